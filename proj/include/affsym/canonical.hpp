#pragma once

#include "affsym/cubic.hpp"
#include "affsym/geometry.hpp"

#include <map>
#include <string>
#include <vector>

namespace affsym {

// Orbit class of a traceless symmetric cubic form under SO(3), named by the
// stabilizer of its canonical representative:
//   ZERO        C = 0
//   ROT_SO2     cubic_so2(lambda), lambda > 0; circle of rotations about e1
//   TETRA_A4    cubic_a4(lambda), lambda > 0; order-12 tetrahedral group
//   TRI_S3      cubic_s3(lambda), lambda > 0; order-6 group, 3-fold axis e3
//   Z3_GENERIC  cubic_z3(lambda, mu), lambda, mu > 0, mu != sqrt(2)*lambda
//   Z2_GENERIC  cubic_z2(lambda, mu), lambda, mu > 0, lambda != mu
//   NO_SYMMETRY fits none of the above within tolerance
enum class CubicClass { ZERO, ROT_SO2, TETRA_A4, TRI_S3, Z3_GENERIC, Z2_GENERIC, NO_SYMMETRY };

// Joint rotational stabilizer of a (cubic, shape operator) pair.
enum class Group { SO3, Z2xSO2, SO2, A4, S3, Z2xZ2, Z3, Z2, TRIVIAL };

const char* to_string(CubicClass cls);
const char* to_string(Group g);
CubicClass cubic_class_from_string(const std::string& s);
Group group_from_string(const std::string& s);

// Result of classifying a cubic alone.  rotation columns are the canonical
// axes expressed in input coordinates: rotate_cubic(C, rotation) matches the
// class template with the returned parameters.  residual is the relative
// template misfit of the accepted class; class_residuals records the best
// misfit of every class that was attempted (more symmetric classes are tried
// first, so entries exist for all classes at least as symmetric as cls).
struct CanonicalForm {
    CubicClass cls = CubicClass::ZERO;
    Mat3 rotation = Mat3::Identity();
    double lambda = 0.0;
    double mu = 0.0;
    double residual = 0.0;
    std::map<std::string, double> class_residuals;
};

CanonicalForm classify_cubic(const CubicTensor& C, double tol = 1e-6);

// Joint stabilizer of (C, S).  S must be symmetric, expressed in the same
// frame as C.  rotation canonicalizes the pair; lambda/mu are the cubic
// parameters and a,b,c,d the shape operator entries S11, S22, S33, S23 in the
// canonical frame.  residual is the largest symmetry defect of the reported
// group's generators on the input pair; margin is the smallest relative
// misfit among the rejected hypotheses of higher symmetry (infinite when
// nothing more symmetric exists).
struct SymmetryReport {
    Group group = Group::TRIVIAL;
    CubicClass cls = CubicClass::ZERO;
    Mat3 rotation = Mat3::Identity();
    double lambda = 0.0;
    double mu = 0.0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double residual = 0.0;
    double margin = 0.0;
    bool ambiguous = false;
    std::map<std::string, double> class_residuals;
};

SymmetryReport stabilizer_pair(const CubicTensor& C, const Mat3& S, double tol = 1e-6);

// Generators of each group acting in its canonical frame.  Continuous factors
// are represented by one rotation with an irrational angle; group_sample
// additionally draws seeded random angles (finite groups return all elements).
std::vector<Mat3> group_generators(Group g);
std::vector<Mat3> group_sample(Group g, int n, uint64_t seed);

// R g R^T, with both arguments validated as rotations.
Mat3 conjugate_to_frame(const Mat3& g, const Mat3& R);

// Invariance defect of the pair under one rotation:
// max(|rotate_cubic(C,g) - C| / (1+|C|), |g^T S g - S| / (1+|S|)).
double symmetry_residual(const CubicTensor& C, const Mat3& S, const Mat3& g);

}  // namespace affsym
