#pragma once

#include "affsym/geometry.hpp"

#include <array>
#include <vector>

namespace affsym {

// Totally symmetric cubic form C_ijk = h(K(e_i,e_j),e_k) in an h-orthonormal
// frame, stored by its 10 independent components. Apolarity (zero trace) is a
// property of the data, not enforced by the type; see trace_vector().
struct CubicTensor {
    // Order: 111,112,113,122,123,133,222,223,233,333.
    std::array<double, 10> comp{};

    static int index(int i, int j, int k);  // 0-based axes
    double operator()(int i, int j, int k) const { return comp[index(i, j, k)]; }
    double& at(int i, int j, int k) { return comp[index(i, j, k)]; }

    // Frobenius norm of the full 27-entry tensor (multiplicity-weighted).
    double norm() const;
    // Trace over the first two slots: sum_i C_iik, one entry per k.
    Vec3 trace_vector() const;

    CubicTensor operator+(const CubicTensor& o) const;
    CubicTensor operator-(const CubicTensor& o) const;
    CubicTensor operator*(double s) const;
};

// f(v) = sum_ijk C_ijk v_i v_j v_k.
double cubic_eval(const CubicTensor& C, const Vec3& v);
// Gradient of f: 3 * C(v, v, .).
Vec3 cubic_grad(const CubicTensor& C, const Vec3& v);
// Full polarization sum_ijk C_ijk x_i y_j z_k.
double cubic_apply(const CubicTensor& C, const Vec3& x, const Vec3& y, const Vec3& z);

// T_il = sum_jk C_ijk C_ljk; rotation-equivariant: T(rotate(C,R)) = R^T T(C) R.
Mat3 t_operator(const CubicTensor& C);

// Express C in the basis given by the columns of R:
// C'_ijk = R_pi R_qj R_rk C_pqr. For R in SO(3) this is the pullback used
// throughout; cubic_eval(rotate(C,R), v) == cubic_eval(C, R*v).
CubicTensor rotate_cubic(const CubicTensor& C, const Mat3& R);

// Canonical cubic families (components in the canonical frame):
CubicTensor cubic_zero();
CubicTensor cubic_so2(double lambda);              // 2ax^3-form: C111=2l, C122=C133=-l
CubicTensor cubic_a4(double lambda);               // C123=l
CubicTensor cubic_s3(double lambda);               // C111=l, C122=-l
CubicTensor cubic_z3(double lambda, double mu);    // so2(l) + C222=m, C233=-m
CubicTensor cubic_z2(double lambda, double mu);    // so2(l) + C123=m

// Global maximum of cubic_eval over the unit sphere via deterministic
// multistart projected ascent with a Newton polish. Returns {max, argmax}.
struct SphereMax {
    double value;
    Vec3 direction;
};
SphereMax sphere_maximize(const CubicTensor& C);

// All distinct local maxima found by the same multistart, sorted by value
// descending (at most max_count survive deduplication).
std::vector<SphereMax> sphere_local_maxima(const CubicTensor& C, int max_count = 8);

}  // namespace affsym
