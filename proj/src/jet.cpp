#include "affsym/jet.hpp"

#include <cmath>
#include <limits>

namespace affsym {

namespace {
// Slot layout: total orders 0..4, within each order lexicographic with a descending.
struct IndexTable {
    int idx[5][5][5];
    constexpr IndexTable() : idx{} {
        int n = 0;
        for (int order = 0; order <= kJetMaxOrder; ++order)
            for (int a = order; a >= 0; --a)
                for (int b = order - a; b >= 0; --b) idx[a][b][order - a - b] = n++;
    }
};
constexpr IndexTable kIndex{};
}  // namespace

int jet_index(int a, int b, int c) {
    if (a < 0 || b < 0 || c < 0 || a + b + c > kJetMaxOrder) throw Error("jet index out of range");
    return kIndex.idx[a][b][c];
}

Eigen::Matrix<double, 4, 3> Jet::tangents() const {
    Eigen::Matrix<double, 4, 3> T;
    T.col(0) = d(1, 0, 0);
    T.col(1) = d(0, 1, 0);
    T.col(2) = d(0, 0, 1);
    return T;
}

double fd_step_for_order(int order, double coord) {
    const double eps = std::numeric_limits<double>::epsilon();
    return std::pow(eps, 1.0 / (order + 2)) * (1.0 + std::abs(coord));
}

}  // namespace affsym
