#pragma once

#include "affsym/affine_core.hpp"
#include "affsym/canonical.hpp"
#include "affsym/surface.hpp"

#include <array>
#include <string>
#include <vector>

namespace affsym {

struct ResidualRecord {
    std::string name;
    double value = 0.0;  // relative residual
    double scale = 1.0;  // denominator used for normalization
    double tolerance = 0.0;
    bool pass = true;
};

// Optional corruption of one named field at the evaluation point, used to
// prove each structure-equation check can actually fail. Stencil values stay
// clean so exactly the identities involving the target are violated.
struct Fault {
    std::string target;  // "h", "S", "C", "Gamma", "GammaHat", "xi"; empty = none
    double magnitude = 1e-2;
    std::uint64_t seed = 1;
};

struct FundamentalOptions {
    double fd_step = 1e-3;
    double tol_derivative = 1e-5;  // checks that differentiate a field
    double tol_pointwise = 1e-8;   // purely algebraic checks
    Fault fault;
};

// Residuals of the integrability system at one point: gauss_nabla, codazzi_c,
// codazzi_s, gauss_hat plus the algebraic s_symmetry, apolarity, volume.
struct FundamentalReport {
    Vec3 point = Vec3::Zero();
    std::vector<ResidualRecord> records;
    bool pass = true;

    const ResidualRecord* find(const std::string& name) const;
};

FundamentalReport check_fundamental(const SurfaceSpec& surface, const Vec3& x,
                                    const FundamentalOptions& opts = {});

// Canonical tangent frame at a point together with the coefficients of the
// Levi-Civita connection of h in that frame. The gauge is made deterministic
// per class and, when `reference` is given, aligned to it by a stabilizer
// element so frames at nearby points form a smooth field.
struct AdaptedFrame {
    Vec3 x = Vec3::Zero();
    SymmetryReport report;
    Eigen::Matrix<double, 4, 3> frame = Eigen::Matrix<double, 4, 3>::Zero();
    Mat3 B = Mat3::Identity();  // coordinate components of the frame columns
    Mat3 h = Mat3::Identity();  // metric in coordinates
    Vec4 xi = Vec4::Zero();
    CubicTensor C;              // adapted-frame components
    Mat3 S = Mat3::Zero();      // adapted-frame components
    double phi_hat[3][3][3] = {};  // [a][b][c]: e_c-coefficient of Dhat_{e_a} e_b
    double sigma = 1.0;            // orientation of e1 against +t
    int tentative_axis = -1;
};

AdaptedFrame adapted_frame(const SurfaceSpec& surface, const Vec3& x,
                           const AdaptedFrame* reference = nullptr);

// Classification of a rotation-invariant point structure along the curve
// direction, by the fibre curvature density nu and the lambda/eta comparison.
enum class WarpedCase { NOT_WARPED, NU_ZERO_LAMBDA_EQ_ETA, NU_ZERO_LAMBDA_NEQ_ETA, NU_NONZERO };

const char* to_string(WarpedCase c);

// Structure functions sampled along a t-coordinate line at fixed (u, v), the
// first-order ODE residuals they must satisfy, and the conserved fibre
// curvature K = e^{2f} nu.
struct StructureReport {
    std::vector<double> t;       // parameter values of the samples
    Vec3 base = Vec3::Zero();    // (t0, u, v) of the first sample
    // Scalar fields per sample. nu = b + eta^2 - lambda^2 is the trichotomy
    // invariant; curvature = exp(2f) * (nu + 2 mu^2) must be t-independent.
    std::vector<double> a, b, lambda, mu, eta, nu, f, curvature;
    double transverse_dev = 0.0;  // max field drift off the axis line
    std::vector<ResidualRecord> records;  // max residual per equation + constancy
    WarpedCase case_label = WarpedCase::NOT_WARPED;
    bool dichotomy_ok = true;  // nu (and lambda-eta) cleanly zero or nonzero
    bool pass = true;
};

StructureReport check_structure(const SurfaceSpec& surface, int n_points = 21,
                                double tol = 1e-4);

// One classified grid point of a scan.
struct ScanPoint {
    Vec3 x = Vec3::Zero();
    bool valid = true;
    std::string error;  // set when the apparatus failed at this point
    Group group = Group::TRIVIAL;
    CubicClass cls = CubicClass::NO_SYMMETRY;
    double lambda = 0, mu = 0;
    double a = 0, b = 0, c = 0, d = 0;  // canonical shape-operator entries
    double residual = 0, margin = 0;
    bool ambiguous = false;
    double c_norm = 0;
    double apolarity = 0, volume_residual = 0, s_asym = 0;
};

struct ScanResult {
    std::array<int, 3> grid{1, 1, 1};
    double tol = 1e-6;
    std::vector<ScanPoint> points;  // row-major over (i, j, k)
};

// Classifies every point of an inclusive grid over the surface domain.
// `scan` distributes points over threads (AFFSYM_THREADS overrides the
// OpenMP default); `scan_serial` is the single-threaded reference and
// produces identical results.
ScanResult scan(const SurfaceSpec& surface, const std::array<int, 3>& grid, double tol = 1e-6);
ScanResult scan_serial(const SurfaceSpec& surface, const std::array<int, 3>& grid,
                       double tol = 1e-6);

}  // namespace affsym
