#pragma once

#include "affsym/geometry.hpp"
#include "affsym/surface.hpp"

namespace affsym {

// Equiaffine point data of a 2-surface in R^3: the n=2 analog of the
// hypersurface pipeline (exponents -1/4 and 1/2, normal = (1/2) Laplacian).
// Used to normalize catalog fibres to |H| = 1 and to cross-check them.
struct PlaneApparatus {
    Mat2 h = Mat2::Identity();   // Blaschke metric in (u,v) coordinates
    Vec3 xi = Vec3::Zero();      // affine normal
    Mat2 S = Mat2::Zero();       // shape operator, (u,v) coordinates
    double H = 0.0;              // affine mean curvature, tr(S)/2
    double volume_residual = 0;  // |det(phi_u, phi_v, xi)| vs sqrt(det h)
    double s_asym = 0;           // shape-operator h-symmetry defect
};

PlaneApparatus plane_apparatus(const SphereSpec& sphere, double u, double v);

}  // namespace affsym
