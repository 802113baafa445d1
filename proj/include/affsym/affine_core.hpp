#pragma once

#include "affsym/cubic.hpp"
#include "affsym/geometry.hpp"
#include "affsym/surface.hpp"

namespace affsym {

// Decomposition F_ij = Gamma^k_ij F_k + G_ij xi~ against a tentative transversal.
struct TentativeSplit {
    int axis = -1;        // R^4 coordinate axis used, 0-based; -1 for a custom transversal
    Vec4 transversal = Vec4::Zero();
    Mat3 G = Mat3::Zero();         // transversal second fundamental form
    double Gamma[3][3][3] = {};    // [k][i][j]
    double omega = 0.0;            // det(F_1, F_2, F_3, transversal)
};

// Picks the R^4 coordinate axis least aligned with the tangent plane
// (largest residual after orthogonal projection); ties prefer e4,e3,e2,e1.
int choose_tentative_axis(const Jet& jet);

TentativeSplit tentative_split(const Jet& jet);  // auto axis
TentativeSplit tentative_split(const Jet& jet, const Vec4& transversal);
TentativeSplit tentative_split(const Jet& jet, int axis);

// Blaschke metric from a tentative split: h = |det G|^(-1/5) |omega|^(2/5) s G
// with s = +-1 chosen so h is positive definite. The |omega| factor makes the
// result independent of the transversal. Throws on rank-deficient or
// indefinite G. sign_out receives s when non-null.
Mat3 affine_metric(const Mat3& G, double omega, int* sign_out = nullptr);

// Metric and its exact first derivatives in parameter space, obtained by
// differentiating the split through the order-3 jet (no finite differences).
struct MetricDerivs {
    TentativeSplit split;
    Mat3 h;
    Mat3 h_inv;
    Mat3 dh[3];  // dh[k] = d h / d x_k
    int sign = 1;
};
MetricDerivs metric_with_derivs(const SurfaceSpec& surface, const Vec3& x, int axis);

// Affine (Blaschke) normal xi = (1/3) Laplacian_h F, computed from the
// order-3 jet. `axis` freezes the tentative transversal so xi is a smooth
// function of x across finite-difference stencils.
Vec4 blaschke_normal(const SurfaceSpec& surface, const Vec3& x, int axis);

// Gram-Schmidt of the given coordinate basis vectors (columns, fixed order
// 1,2,3) under the inner product h. Columns of the result express the
// orthonormal frame in the input basis; upper triangular by construction.
Mat3 orthonormalize(const Mat3& h, const Mat3& basis = Mat3::Identity());

struct ApparatusDiagnostics {
    double apolarity = 0;           // |sum_k C_kka|, relative to 1 + ||C||
    double volume_residual = 0;     // |det(F1,F2,F3,xi) - sqrt(det h)| / sqrt(det h)
    double tangency = 0;            // worst xi-component of D_i xi, relative
    double c_asym = 0;              // pre-symmetrization asymmetry of frame C
    double s_asym = 0;              // ||S - S^T|| / (1 + ||S||) of frame S
    double metric_consistency = 0;  // ||h(re-split with xi) - h|| / (1 + ||h||)
};

// Full equiaffine point data: metric, normal, difference tensor and shape
// operator, expressed both in parameter coordinates and in an h-orthonormal
// frame with det(f1, f2, f3, xi) > 0.
struct PointApparatus {
    Jet jet;
    int tentative_axis = -1;
    Mat3 h = Mat3::Identity();
    Mat3 h_inv = Mat3::Identity();
    Vec4 xi = Vec4::Zero();
    Mat3 B = Mat3::Identity();  // frame coefficients over the coordinate basis
    Eigen::Matrix<double, 4, 3> frame = Eigen::Matrix<double, 4, 3>::Zero();
    CubicTensor C;  // frame components
    Mat3 S = Mat3::Zero();  // frame components, symmetrized

    double Gamma[3][3][3] = {};     // induced connection, coordinates, [k][i][j]
    double GammaHat[3][3][3] = {};  // Levi-Civita of h
    double K[3][3][3] = {};         // Gamma - GammaHat
    Mat3 S_coord = Mat3::Zero();

    ApparatusDiagnostics diag;
};

PointApparatus apparatus(const SurfaceSpec& surface, const Vec3& x);
// Variant with a frozen transversal axis, for stencil evaluation.
PointApparatus apparatus(const SurfaceSpec& surface, const Vec3& x, int axis);

}  // namespace affsym
