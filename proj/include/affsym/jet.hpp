#pragma once

#include "affsym/geometry.hpp"

#include <array>

namespace affsym {

// Number of partials d^a_t d^b_u d^c_v with a+b+c <= 4.
inline constexpr int kJetMaxOrder = 4;
inline constexpr int kJetSlots = 35;

// Dense index of the multi-index (a,b,c); lexicographic within each total order.
int jet_index(int a, int b, int c);

// Parameter-space jet of an immersion F: R^3 -> R^4 at one point.
struct Jet {
    Vec3 point = Vec3::Zero();
    int order = 0;
    bool fd_fallback = false;   // true when partials came from finite differences
    double fd_step = 0.0;       // base step used on the finite-difference path
    std::array<Vec4, kJetSlots> table{};

    const Vec4& d(int a, int b, int c) const { return table[jet_index(a, b, c)]; }
    Vec4& d(int a, int b, int c) { return table[jet_index(a, b, c)]; }

    const Vec4& position() const { return table[0]; }
    // First partials as columns t,u,v.
    Eigen::Matrix<double, 4, 3> tangents() const;
};

// Central difference with one Richardson level: error O(step^4) plus
// roundoff ~ eps/step. F must be smooth near x.
template <typename F>
auto richardson_central(F&& f, double x, double step) -> decltype(f(x)) {
    // Materialize each sample: expression templates must not outlive them.
    using Result = decltype(f(x));
    const Result fp = f(x + step);
    const Result fm = f(x - step);
    const Result hp = f(x + step / 2);
    const Result hm = f(x - step / 2);
    const Result d_full = (fp - fm) / (2.0 * step);
    const Result d_half = (hp - hm) / step;
    return (4.0 * d_half - d_full) / 3.0;
}

// Step sizes tuned per derivative order for finite-difference jets:
// eps^(1/(order+2)) * (1 + |coord|).
double fd_step_for_order(int order, double coord);

}  // namespace affsym
