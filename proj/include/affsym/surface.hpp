#pragma once

#include "affsym/geometry.hpp"
#include "affsym/jet.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace affsym {

// Curve component basis {1, t, t^2, t^3, e^t, e^-t, cosh t, sinh t}.
inline constexpr int kCurveBasisSize = 8;
using CurveCoeffs = std::array<double, kCurveBasisSize>;

double curve_basis_eval(int basis_fn, double t, int deriv);

// Planar curve gamma = (gamma1, gamma2) entering the warped-product builders.
struct CurveSpec {
    CurveCoeffs c1{};
    CurveCoeffs c2{};
    std::array<double, 2> domain{0.0, 1.0};

    double gamma1(double t, int deriv = 0) const;
    double gamma2(double t, int deriv = 0) const;
};

// A 2-surface in R^3 used as the fibre of a warped product. For improper
// graphs the components are (u, v, f(u,v)).
struct SphereSpec {
    enum class Kind { ProperElliptic, ProperHyperbolic, ImproperGraph };

    Kind kind = Kind::ProperElliptic;
    std::string id;
    std::array<std::array<double, 2>, 2> domain{{{-0.5, 0.5}, {-0.5, 0.5}}};
    // partial(u, v, du, dv) = d^du_u d^dv_v phi; analytic to any order we ask.
    std::function<Vec3(double, double, int, int)> partial;
    // Mean curvature of the normalized surface, measured when built.
    double mean_curvature = 0.0;
};

enum class SurfaceFamily { Plain, Z2Z2, ProperWarped, ImproperScaling, ImproperTranslation };

// A hypersurface immersion F: R^3 -> R^4 with closed-form partials.
struct SurfaceSpec {
    std::string id;
    SurfaceFamily family = SurfaceFamily::Plain;
    std::array<std::array<double, 2>, 3> domain{{{-1, 1}, {-1, 1}, {-1, 1}}};
    std::optional<std::string> expected_group;

    // Analytic partials d^a_t d^b_u d^c_v F up to analytic_order.
    std::function<Vec4(const Vec3&, int, int, int)> partial;
    int analytic_order = kJetMaxOrder;

    std::shared_ptr<const CurveSpec> curve;    // set for warped families
    std::shared_ptr<const SphereSpec> sphere;  // set for warped families

    Vec3 domain_center() const;
    bool in_domain(const Vec3& x) const;
};

// Evaluates the jet of F at x up to `order`. Falls back to central
// differences of F when order exceeds the analytic capability; the result is
// then tagged fd_fallback with the step recorded. Checks the immersion rank.
Jet jet(const SurfaceSpec& surface, const Vec3& x, int order);

// Position-only surface, everything by finite differences (testing hook).
SurfaceSpec surface_from_position(std::string id, std::function<Vec4(const Vec3&)> position,
                                  std::array<std::array<double, 2>, 3> domain);

}  // namespace affsym
