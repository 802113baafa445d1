#pragma once

#include "affsym/surface.hpp"

#include <memory>
#include <string>
#include <vector>

namespace affsym {

// Closed-form test hypersurfaces F: R^3 -> R^4.
SurfaceSpec make_z2z2();              // (e^t + 2v^2, e^-t + 2u^2, 2v, 2u)
SurfaceSpec make_unit_sphere3();      // round S^3 chart
SurfaceSpec make_paraboloid_graph3(); // graph of |x|^2 / 2

// Fibre 2-surfaces for the warped-product builders. Proper fibres are
// normalized so the affine mean curvature is exactly +1 or -1; the improper
// fibre is a graph with mean curvature 0.
SphereSpec make_unit_sphere2();
SphereSpec make_elliptic_paraboloid();
SphereSpec make_hyperbolic_xyz(); // xy z = c with c = 3^(-3/2)

// F = (gamma1, gamma2 * phi). Requires a proper fibre and a curve satisfying
// -g1 g1' W > 0 (elliptic fibre) or g1 g1' W > 0 (hyperbolic fibre) on the
// whole domain, where W = g2'' g1' - g1'' g2'. Throws Error otherwise.
SurfaceSpec make_proper_warped(const SphereSpec& fibre, const CurveSpec& curve);

// Graph fibre phi = (u, v, f). translation_only = false builds
// F = (g1 u, g1 v, g1 f + g2, g1), needing g1 g1' W > 0; translation_only =
// true builds F = (u, v, f + g2, g1), needing g1' W > 0.
SurfaceSpec make_improper_warped(const SphereSpec& fibre, const CurveSpec& curve,
                                 bool translation_only);

CurveSpec default_proper_elliptic_curve();      // (cosh t, sinh t + 2)     on [0.2, 1.2]
CurveSpec default_proper_hyperbolic_curve();    // (sinh t + 2, cosh t + 1) on [0.2, 1.2]
CurveSpec default_improper_curve();             // (t + 2, t^2)             on [0.5, 1.5]
CurveSpec default_improper_translation_curve(); // (t + 2, t^3)             on [0.5, 1.5]

// Every catalog surface with its default curve.
std::vector<SurfaceSpec> catalog_surfaces();

// Lookup by id. Warped families use "family:fibre" syntax, e.g.
// "proper_warped:unit_sphere2". A non-null curve overrides the default.
SurfaceSpec surface_by_name(const std::string& name,
                            std::shared_ptr<const CurveSpec> curve = nullptr);
SphereSpec sphere_by_name(const std::string& name);

}  // namespace affsym
