#include "affsym/surface.hpp"

#include <cmath>

namespace affsym {

double curve_basis_eval(int basis_fn, double t, int deriv) {
    switch (basis_fn) {
        case 0:  // 1
            return deriv == 0 ? 1.0 : 0.0;
        case 1:  // t
            return deriv == 0 ? t : (deriv == 1 ? 1.0 : 0.0);
        case 2:  // t^2
            return deriv == 0 ? t * t : (deriv == 1 ? 2.0 * t : (deriv == 2 ? 2.0 : 0.0));
        case 3:  // t^3
            switch (deriv) {
                case 0: return t * t * t;
                case 1: return 3.0 * t * t;
                case 2: return 6.0 * t;
                case 3: return 6.0;
                default: return 0.0;
            }
        case 4: return std::exp(t);
        case 5: return (deriv % 2 ? -1.0 : 1.0) * std::exp(-t);
        case 6: return deriv % 2 ? std::sinh(t) : std::cosh(t);
        case 7: return deriv % 2 ? std::cosh(t) : std::sinh(t);
        default: throw Error("curve basis function out of range");
    }
}

static double curve_eval(const CurveCoeffs& c, double t, int deriv) {
    double acc = 0.0;
    for (int k = 0; k < kCurveBasisSize; ++k)
        if (c[k] != 0.0) acc += c[k] * curve_basis_eval(k, t, deriv);
    return acc;
}

double CurveSpec::gamma1(double t, int deriv) const { return curve_eval(c1, t, deriv); }
double CurveSpec::gamma2(double t, int deriv) const { return curve_eval(c2, t, deriv); }

Vec3 SurfaceSpec::domain_center() const {
    return {0.5 * (domain[0][0] + domain[0][1]), 0.5 * (domain[1][0] + domain[1][1]),
            0.5 * (domain[2][0] + domain[2][1])};
}

bool SurfaceSpec::in_domain(const Vec3& x) const {
    for (int i = 0; i < 3; ++i)
        if (x[i] < domain[i][0] - 1e-12 || x[i] > domain[i][1] + 1e-12) return false;
    return true;
}

namespace {

// Central-difference stencils, O(h^2): offsets and weights for f^(k).
struct Stencil {
    int npts;
    int off[5];
    double w[5];
};

const Stencil& stencil_for(int k) {
    static const Stencil s0{1, {0}, {1.0}};
    static const Stencil s1{2, {-1, 1}, {-0.5, 0.5}};
    static const Stencil s2{3, {-1, 0, 1}, {1.0, -2.0, 1.0}};
    static const Stencil s3{4, {-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}};
    static const Stencil s4{5, {-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}};
    static const Stencil* table[5] = {&s0, &s1, &s2, &s3, &s4};
    return *table[k];
}

// Tensor-product finite difference of the position map.
Vec4 fd_partial(const std::function<Vec4(const Vec3&)>& pos, const Vec3& x, int a, int b, int c,
                double ht, double hu, double hv) {
    const Stencil &sa = stencil_for(a), &sb = stencil_for(b), &sc = stencil_for(c);
    Vec4 acc = Vec4::Zero();
    for (int i = 0; i < sa.npts; ++i)
        for (int j = 0; j < sb.npts; ++j)
            for (int k = 0; k < sc.npts; ++k) {
                Vec3 p(x[0] + sa.off[i] * ht, x[1] + sb.off[j] * hu, x[2] + sc.off[k] * hv);
                acc += sa.w[i] * sb.w[j] * sc.w[k] * pos(p);
            }
    const double denom = std::pow(ht, a) * std::pow(hu, b) * std::pow(hv, c);
    return acc / denom;
}

}  // namespace

Jet jet(const SurfaceSpec& surface, const Vec3& x, int order) {
    if (order < 1 || order > kJetMaxOrder) throw Error("jet order must be in [1,4]");
    if (!surface.partial) throw Error("surface has no evaluator");

    Jet J;
    J.point = x;
    J.order = order;

    const int analytic_to = std::min(order, surface.analytic_order);
    for (int total = 0; total <= analytic_to; ++total)
        for (int a = total; a >= 0; --a)
            for (int b = total - a; b >= 0; --b) J.d(a, b, total - a - b) = surface.partial(x, a, b, total - a - b);

    if (order > surface.analytic_order) {
        J.fd_fallback = true;
        auto pos = [&](const Vec3& p) { return surface.partial(p, 0, 0, 0); };
        for (int total = surface.analytic_order + 1; total <= order; ++total) {
            const double ht = fd_step_for_order(total, x[0]);
            const double hu = fd_step_for_order(total, x[1]);
            const double hv = fd_step_for_order(total, x[2]);
            J.fd_step = std::max(J.fd_step, std::max(ht, std::max(hu, hv)));
            for (int a = total; a >= 0; --a)
                for (int b = total - a; b >= 0; --b)
                    J.d(a, b, total - a - b) = fd_partial(pos, x, a, b, total - a - b, ht, hu, hv);
        }
    }

    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(J.tangents());
    if (svd.singularValues()(2) <= 1e-10 * svd.singularValues()(0))
        throw Error("not an immersion here");
    return J;
}

SurfaceSpec surface_from_position(std::string id, std::function<Vec4(const Vec3&)> position,
                                  std::array<std::array<double, 2>, 3> domain) {
    SurfaceSpec s;
    s.id = std::move(id);
    s.domain = domain;
    s.analytic_order = 0;
    s.partial = [fn = std::move(position)](const Vec3& x, int a, int b, int c) -> Vec4 {
        if (a == 0 && b == 0 && c == 0) return fn(x);
        throw Error("position-only surface has no analytic partials");
    };
    return s;
}

}  // namespace affsym
