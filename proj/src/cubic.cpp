#include "affsym/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace affsym {

namespace {
// comp slot for each sorted triple, and permutation multiplicity.
constexpr int kSlot[3][3][3] = {
    {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}},
    {{1, 3, 4}, {3, 6, 7}, {4, 7, 8}},
    {{2, 4, 5}, {4, 7, 8}, {5, 8, 9}},
};
constexpr double kMult[10] = {1, 3, 3, 3, 6, 3, 1, 3, 3, 1};
}  // namespace

int CubicTensor::index(int i, int j, int k) { return kSlot[i][j][k]; }

double CubicTensor::norm() const {
    double n2 = 0.0;
    for (int s = 0; s < 10; ++s) n2 += kMult[s] * comp[s] * comp[s];
    return std::sqrt(n2);
}

Vec3 CubicTensor::trace_vector() const {
    Vec3 t;
    for (int k = 0; k < 3; ++k) t[k] = (*this)(0, 0, k) + (*this)(1, 1, k) + (*this)(2, 2, k);
    return t;
}

CubicTensor CubicTensor::operator+(const CubicTensor& o) const {
    CubicTensor r;
    for (int s = 0; s < 10; ++s) r.comp[s] = comp[s] + o.comp[s];
    return r;
}
CubicTensor CubicTensor::operator-(const CubicTensor& o) const {
    CubicTensor r;
    for (int s = 0; s < 10; ++s) r.comp[s] = comp[s] - o.comp[s];
    return r;
}
CubicTensor CubicTensor::operator*(double s) const {
    CubicTensor r;
    for (int t = 0; t < 10; ++t) r.comp[t] = comp[t] * s;
    return r;
}

double cubic_eval(const CubicTensor& C, const Vec3& v) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) acc += C(i, j, k) * v[i] * v[j] * v[k];
    return acc;
}

Vec3 cubic_grad(const CubicTensor& C, const Vec3& v) {
    Vec3 g = Vec3::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) g[i] += 3.0 * C(i, j, k) * v[j] * v[k];
    return g;
}

double cubic_apply(const CubicTensor& C, const Vec3& x, const Vec3& y, const Vec3& z) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) acc += C(i, j, k) * x[i] * y[j] * z[k];
    return acc;
}

Mat3 t_operator(const CubicTensor& C) {
    Mat3 T = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
        for (int l = i; l < 3; ++l) {
            double acc = 0.0;
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) acc += C(i, j, k) * C(l, j, k);
            T(i, l) = T(l, i) = acc;
        }
    return T;
}

CubicTensor rotate_cubic(const CubicTensor& C, const Mat3& R) {
    CubicTensor out;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            for (int k = j; k < 3; ++k) {
                double acc = 0.0;
                for (int p = 0; p < 3; ++p)
                    for (int q = 0; q < 3; ++q)
                        for (int r = 0; r < 3; ++r) acc += R(p, i) * R(q, j) * R(r, k) * C(p, q, r);
                out.at(i, j, k) = acc;
            }
    return out;
}

CubicTensor cubic_zero() { return {}; }

CubicTensor cubic_so2(double l) {
    CubicTensor c;
    c.at(0, 0, 0) = 2.0 * l;
    c.at(0, 1, 1) = -l;
    c.at(0, 2, 2) = -l;
    return c;
}

CubicTensor cubic_a4(double l) {
    CubicTensor c;
    c.at(0, 1, 2) = l;
    return c;
}

CubicTensor cubic_s3(double l) {
    CubicTensor c;
    c.at(0, 0, 0) = l;
    c.at(0, 1, 1) = -l;
    return c;
}

CubicTensor cubic_z3(double l, double m) {
    CubicTensor c = cubic_so2(l);
    c.at(1, 1, 1) = m;
    c.at(1, 2, 2) = -m;
    return c;
}

CubicTensor cubic_z2(double l, double m) {
    CubicTensor c = cubic_so2(l);
    c.at(0, 1, 2) = m;
    return c;
}

namespace {

// One tangent-space Newton step for f on the sphere at unit v.
Vec3 sphere_newton_step(const CubicTensor& C, const Vec3& v) {
    // Basis of the tangent plane.
    Vec3 a = std::abs(v.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    Vec3 t1 = (a - a.dot(v) * v).normalized();
    Vec3 t2 = v.cross(t1);
    const Vec3 g = cubic_grad(C, v);
    // Hessian of f restricted to the sphere: 6*C(v,.,.) - f'' correction
    // from the constraint curvature: H_ab = 6 C(v,ta,tb) - (g.v) delta_ab.
    Mat3 Cv = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) Cv(j, k) += 6.0 * C(i, j, k) * v[i];
    Eigen::Matrix2d H;
    H(0, 0) = t1.dot(Cv * t1) - g.dot(v);
    H(0, 1) = H(1, 0) = t1.dot(Cv * t2);
    H(1, 1) = t2.dot(Cv * t2) - g.dot(v);
    Eigen::Vector2d gt(g.dot(t1), g.dot(t2));
    if (std::abs(H.determinant()) < 1e-14 * (1.0 + H.norm() * H.norm())) return v;
    Eigen::Vector2d s = H.fullPivLu().solve(-gt);
    if (s.norm() > 0.5) s *= 0.5 / s.norm();
    return (v + s[0] * t1 + s[1] * t2).normalized();
}

// Projected gradient ascent with backtracking, then Newton polish.
SphereMax ascend(const CubicTensor& C, Vec3 v) {
    double step = 0.5;
    double f = cubic_eval(C, v);
    for (int it = 0; it < 200; ++it) {
        Vec3 g = cubic_grad(C, v);
        Vec3 gt = g - g.dot(v) * v;
        if (gt.norm() < 1e-12) break;
        Vec3 w = (v + step * gt).normalized();
        double fw = cubic_eval(C, w);
        if (fw > f) {
            v = w;
            f = fw;
            step *= 1.2;
        } else {
            step *= 0.5;
            if (step < 1e-14) break;
        }
    }
    for (int it = 0; it < 40; ++it) {
        Vec3 w = sphere_newton_step(C, v);
        if ((w - v).norm() < 1e-15) break;
        // Accept Newton only while it does not decrease f.
        if (cubic_eval(C, w) + 1e-15 < cubic_eval(C, v)) break;
        v = w;
    }
    return {cubic_eval(C, v), v};
}

std::vector<Vec3> ascent_starts(const CubicTensor& C) {
    std::vector<Vec3> starts;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int k = -1; k <= 1; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                starts.emplace_back(Vec3(i, j, k).normalized());
            }
    Eigen::SelfAdjointEigenSolver<Mat3> es(t_operator(C));
    for (int c = 0; c < 3; ++c) {
        starts.emplace_back(es.eigenvectors().col(c));
        starts.emplace_back(-es.eigenvectors().col(c));
    }
    return starts;
}

}  // namespace

SphereMax sphere_maximize(const CubicTensor& C) {
    SphereMax best{-std::numeric_limits<double>::infinity(), Vec3::UnitX()};
    for (const Vec3& v : ascent_starts(C)) {
        const SphereMax m = ascend(C, v);
        if (m.value > best.value) best = m;
    }
    return best;
}

std::vector<SphereMax> sphere_local_maxima(const CubicTensor& C, int max_count) {
    std::vector<SphereMax> found;
    for (const Vec3& v : ascent_starts(C)) {
        const SphereMax m = ascend(C, v);
        bool dup = false;
        for (auto& f : found)
            if (f.direction.dot(m.direction) > 1.0 - 1e-9) {
                dup = true;
                if (m.value > f.value) f = m;
                break;
            }
        if (!dup) found.push_back(m);
    }
    std::sort(found.begin(), found.end(),
              [](const SphereMax& x, const SphereMax& y) { return x.value > y.value; });
    if (static_cast<int>(found.size()) > max_count) found.resize(max_count);
    return found;
}

}  // namespace affsym
