#include "affsym/canonical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace affsym {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// Multiplicity weights: the Euclidean norm of the weighted 10-vector equals
// the full 27-entry Frobenius norm, so template fitting minimizes the same
// distance that CubicTensor::norm measures.
constexpr double kMult10[10] = {1, 3, 3, 3, 6, 3, 1, 3, 3, 1};

using Vec10 = Eigen::Matrix<double, 10, 1>;

Vec10 cvec(const CubicTensor& C) {
    Vec10 v;
    for (int s = 0; s < 10; ++s) v[s] = std::sqrt(kMult10[s]) * C.comp[s];
    return v;
}

int param_count(CubicClass cls) {
    switch (cls) {
        case CubicClass::ROT_SO2:
        case CubicClass::TETRA_A4:
        case CubicClass::TRI_S3:
            return 1;
        case CubicClass::Z3_GENERIC:
        case CubicClass::Z2_GENERIC:
            return 2;
        default:
            return 0;
    }
}

CubicTensor class_template(CubicClass cls, double l, double m) {
    switch (cls) {
        case CubicClass::ROT_SO2:
            return cubic_so2(l);
        case CubicClass::TETRA_A4:
            return cubic_a4(l);
        case CubicClass::TRI_S3:
            return cubic_s3(l);
        case CubicClass::Z3_GENERIC:
            return cubic_z3(l, m);
        case CubicClass::Z2_GENERIC:
            return cubic_z2(l, m);
        default:
            return cubic_zero();
    }
}

// Templates are linear in their parameters; columns span the family.
Eigen::Matrix<double, 10, 2> template_basis(CubicClass cls) {
    Eigen::Matrix<double, 10, 2> B;
    B.col(0) = cvec(class_template(cls, 1.0, 0.0));
    B.col(1) = param_count(cls) == 2 ? cvec(class_template(cls, 0.0, 1.0)) : Vec10::Zero().eval();
    return B;
}

struct Fit {
    double lambda = 0.0;
    double mu = 0.0;
    double resid = kInf;
};

// Best parameters at a fixed rotation: a linear least-squares projection.
Fit fit_params(CubicClass cls, const CubicTensor& Crot) {
    const Vec10 y = cvec(Crot);
    Fit f;
    const int p = param_count(cls);
    if (p == 0) {
        f.resid = y.norm();
        return f;
    }
    const Eigen::Matrix<double, 10, 2> B = template_basis(cls);
    if (p == 1) {
        f.lambda = y.dot(B.col(0)) / B.col(0).squaredNorm();
        f.resid = (y - f.lambda * B.col(0)).norm();
    } else {
        const Eigen::Matrix2d G = B.transpose() * B;
        const Eigen::Vector2d th = G.ldlt().solve(B.transpose() * y);
        f.lambda = th[0];
        f.mu = th[1];
        f.resid = (y - B * th).norm();
    }
    return f;
}

struct Polished {
    Mat3 R = Mat3::Identity();
    Fit fit;
};

// Variable-projection Gauss-Newton over SO(3): parameters are refit exactly
// at every trial rotation, the rotation moves along R * exp(w).  Singular
// directions (continuous stabilizers of the template) are suppressed by the
// SVD threshold, which yields least-norm steps.
Polished polish_class(CubicClass cls, const CubicTensor& Chat, const Mat3& R0) {
    const int p = param_count(cls);
    const Eigen::Matrix<double, 10, 2> B = template_basis(cls);
    Polished cur;
    cur.R = R0;
    cur.fit = fit_params(cls, rotate_cubic(Chat, R0));
    const double jstep = 1e-5;
    for (int iter = 0; iter < 80 && cur.fit.resid > 1e-15; ++iter) {
        const Eigen::Vector2d th(cur.fit.lambda, cur.fit.mu);
        const Vec10 r = cvec(rotate_cubic(Chat, cur.R)) - B * th;
        Eigen::MatrixXd J(10, 3 + p);
        for (int a = 0; a < 3; ++a) {
            Vec3 w = Vec3::Zero();
            w[a] = jstep;
            const Vec10 fp = cvec(rotate_cubic(Chat, cur.R * so3_exp(w)));
            const Vec10 fm = cvec(rotate_cubic(Chat, cur.R * so3_exp(-w)));
            J.col(a) = (fp - fm) / (2.0 * jstep);
        }
        for (int q = 0; q < p; ++q) J.col(3 + q) = -B.col(q);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-8);
        const Eigen::VectorXd delta = svd.solve(-r);
        Vec3 dw = delta.head<3>();
        if (dw.norm() > 0.5) dw *= 0.5 / dw.norm();
        bool improved = false;
        double t = 1.0;
        for (int ls = 0; ls < 10; ++ls, t *= 0.5) {
            const Mat3 Rt = cur.R * so3_exp(t * dw);
            const Fit ft = fit_params(cls, rotate_cubic(Chat, Rt));
            if (ft.resid <= cur.fit.resid) {
                improved = ft.resid < cur.fit.resid - 1e-17;
                cur.R = Rt;
                cur.fit = ft;
                break;
            }
        }
        if (!improved) break;
    }
    return cur;
}

// Deterministic right-handed frame with the given unit first column.
Mat3 frame_from_axis(const Vec3& u) {
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(u[i]) < std::abs(u[k])) k = i;
    Vec3 w1 = Vec3::Unit(k) - Vec3::Unit(k).dot(u) * u;
    w1.normalize();
    Mat3 R;
    R.col(0) = u;
    R.col(1) = w1;
    R.col(2) = u.cross(w1);
    return R;
}

Vec3 fix_sign(const Vec3& v) {
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(v[i]) > std::abs(v[k])) k = i;
    return v[k] < 0 ? Vec3(-v) : v;
}

double wrap_third(double th) {
    const double period = 2.0 * kPi / 3.0;
    th = std::fmod(th, period);
    if (th < 0) th += period;
    return th;
}

// Frame for the 3-fold template with axis e3: the in-plane restriction of a
// harmonic cubic is a*cos(3t) + b*sin(3t), so the lobe direction is at
// atan2(b, a)/3 from the completion basis.
Mat3 s3_frame(const CubicTensor& C, const Vec3& u3) {
    const Mat3 A = frame_from_axis(u3);
    const Vec3 w1 = A.col(1), w2 = A.col(2);
    const double a = cubic_apply(C, w1, w1, w1);
    const double b = cubic_apply(C, w1, w1, w2);
    const double th = wrap_third(std::atan2(b, a) / 3.0);
    const Vec3 u1 = std::cos(th) * w1 + std::sin(th) * w2;
    Mat3 R;
    R.col(0) = u1;
    R.col(1) = u3.cross(u1);
    R.col(2) = u3;
    return R;
}

// Frame for the 3-fold-about-e1 template: same extraction in the plane
// orthogonal to the rotation axis.
Mat3 z3_frame(const CubicTensor& C, const Vec3& u1) {
    const Mat3 A = frame_from_axis(u1);
    const Vec3 w2 = A.col(1), w3 = A.col(2);
    const double a = cubic_apply(C, w2, w2, w2);
    const double b = cubic_apply(C, w2, w2, w3);
    const double th = wrap_third(std::atan2(b, a) / 3.0);
    const Vec3 u2 = std::cos(th) * w2 + std::sin(th) * w3;
    Mat3 R;
    R.col(0) = u1;
    R.col(1) = u2;
    R.col(2) = u1.cross(u2);
    return R;
}

// Seeds for the xyz template: local sphere maxima of an xyz-form cubic sit
// on four directions with pairwise inner product -1/3; sums of two of them
// are the canonical coordinate axes.
std::vector<Mat3> seeds_a4(const CubicTensor& Chat) {
    std::vector<Mat3> out;
    const auto maxima = sphere_local_maxima(Chat, 8);
    const int n = static_cast<int>(maxima.size());
    for (int i = 0; i < n && out.size() < 4; ++i)
        for (int j = 0; j < n && out.size() < 4; ++j)
            for (int k = 0; k < n && out.size() < 4; ++k) {
                if (i == j || j == k || i == k) continue;
                const Vec3 d1 = maxima[i].direction;
                const Vec3 d2 = maxima[j].direction;
                const Vec3 d3 = maxima[k].direction;
                if (std::abs(d1.dot(d2) + 1.0 / 3.0) > 0.25) continue;
                if (std::abs(d1.dot(d3) + 1.0 / 3.0) > 0.25) continue;
                if (std::abs(d2.dot(d3) + 1.0 / 3.0) > 0.25) continue;
                const Vec3 u1 = (d1 + d2).normalized();
                Vec3 u2 = d1 + d3;
                u2 -= u2.dot(u1) * u1;
                u2.normalize();
                Mat3 R;
                R.col(0) = u1;
                R.col(1) = u2;
                R.col(2) = u1.cross(u2);
                out.push_back(R);
            }
    if (out.empty()) out.push_back(Mat3::Identity());
    return out;
}

std::vector<Mat3> make_seeds(CubicClass cls, const CubicTensor& Chat, const Vec3& q, const Mat3& V) {
    std::vector<Mat3> seeds;
    auto signfix = [&](const Vec3& v) { return cubic_eval(Chat, v) >= 0 ? v : Vec3(-v); };
    switch (cls) {
        case CubicClass::ROT_SO2:
            for (int c = 0; c < 3; ++c) seeds.push_back(frame_from_axis(signfix(V.col(c))));
            break;
        case CubicClass::TETRA_A4:
            seeds = seeds_a4(Chat);
            break;
        case CubicClass::TRI_S3:
            for (int c = 0; c < 3; ++c) seeds.push_back(s3_frame(Chat, V.col(c)));
            break;
        case CubicClass::Z3_GENERIC:
            for (int c = 0; c < 3; ++c) seeds.push_back(z3_frame(Chat, signfix(V.col(c))));
            break;
        case CubicClass::Z2_GENERIC:
            // Try each eigenvector as the 2-fold axis; of the remaining two
            // eigendirections the larger eigenvalue belongs to (e2-e3)/sqrt2.
            for (int t = 0; t < 3; ++t) {
                const int o1 = (t + 1) % 3, o2 = (t + 2) % 3;
                const int big = q[o1] >= q[o2] ? o1 : o2;
                const int small = big == o1 ? o2 : o1;
                const Vec3 u1 = signfix(V.col(t));
                const Vec3 p = V.col(big), m = V.col(small);
                for (int sp = 0; sp < 2; ++sp) {
                    const Vec3 u2 = (m + (sp ? -1.0 : 1.0) * p).normalized();
                    Mat3 R;
                    R.col(0) = u1;
                    R.col(1) = u2;
                    R.col(2) = u1.cross(u2);
                    seeds.push_back(R);
                }
            }
            break;
        default:
            break;
    }
    if (seeds.empty()) seeds.push_back(Mat3::Identity());
    return seeds;
}

// In-class sign canonicalization: lambda >= 0 and mu >= 0, enforced by
// composing with rotations that stabilize the rest of the template.
void canonicalize_in_class(CubicClass cls, Polished& P, const CubicTensor& Chat) {
    for (int pass = 0; pass < 3; ++pass) {
        bool changed = false;
        if (P.fit.lambda < 0) {
            switch (cls) {
                case CubicClass::ROT_SO2:
                case CubicClass::Z3_GENERIC:
                case CubicClass::Z2_GENERIC:
                    P.R = P.R * rot_P(2);
                    changed = true;
                    break;
                case CubicClass::TRI_S3:
                    P.R = P.R * axis_rotation(Vec3::UnitZ(), kPi / 3.0);
                    changed = true;
                    break;
                case CubicClass::TETRA_A4:
                    P.R = P.R * axis_rotation(Vec3::UnitX(), kPi / 2.0);
                    changed = true;
                    break;
                default:
                    break;
            }
        } else if (P.fit.mu < 0) {
            switch (cls) {
                case CubicClass::Z3_GENERIC:
                    P.R = P.R * axis_rotation(Vec3::UnitX(), kPi / 3.0);
                    changed = true;
                    break;
                case CubicClass::Z2_GENERIC:
                    P.R = P.R * axis_rotation(Vec3::UnitX(), kPi / 2.0);
                    changed = true;
                    break;
                default:
                    break;
            }
        }
        if (!changed) break;
        P.fit = fit_params(cls, rotate_cubic(Chat, P.R));
    }
}

Polished best_fit(CubicClass cls, const CubicTensor& Chat, const Vec3& q, const Mat3& V) {
    Polished best;
    for (const Mat3& R0 : make_seeds(cls, Chat, q, V)) {
        Polished p = polish_class(cls, Chat, R0);
        canonicalize_in_class(cls, p, Chat);
        if (p.fit.resid < best.fit.resid) best = p;
    }
    return best;
}

}  // namespace

const char* to_string(CubicClass cls) {
    switch (cls) {
        case CubicClass::ZERO:
            return "ZERO";
        case CubicClass::ROT_SO2:
            return "ROT_SO2";
        case CubicClass::TETRA_A4:
            return "TETRA_A4";
        case CubicClass::TRI_S3:
            return "TRI_S3";
        case CubicClass::Z3_GENERIC:
            return "Z3_GENERIC";
        case CubicClass::Z2_GENERIC:
            return "Z2_GENERIC";
        case CubicClass::NO_SYMMETRY:
            return "NO_SYMMETRY";
    }
    return "?";
}

const char* to_string(Group g) {
    switch (g) {
        case Group::SO3:
            return "SO3";
        case Group::Z2xSO2:
            return "Z2xSO2";
        case Group::SO2:
            return "SO2";
        case Group::A4:
            return "A4";
        case Group::S3:
            return "S3";
        case Group::Z2xZ2:
            return "Z2xZ2";
        case Group::Z3:
            return "Z3";
        case Group::Z2:
            return "Z2";
        case Group::TRIVIAL:
            return "TRIVIAL";
    }
    return "?";
}

CubicClass cubic_class_from_string(const std::string& s) {
    for (CubicClass c : {CubicClass::ZERO, CubicClass::ROT_SO2, CubicClass::TETRA_A4,
                         CubicClass::TRI_S3, CubicClass::Z3_GENERIC, CubicClass::Z2_GENERIC,
                         CubicClass::NO_SYMMETRY})
        if (s == to_string(c)) return c;
    throw Error("unknown cubic class: " + s);
}

Group group_from_string(const std::string& s) {
    for (Group g : {Group::SO3, Group::Z2xSO2, Group::SO2, Group::A4, Group::S3, Group::Z2xZ2,
                    Group::Z3, Group::Z2, Group::TRIVIAL})
        if (s == to_string(g)) return g;
    throw Error("unknown group: " + s);
}

CanonicalForm classify_cubic(const CubicTensor& C, double tol) {
    CanonicalForm out;
    const double n = C.norm();
    if (n <= tol) {
        out.cls = CubicClass::ZERO;
        out.residual = n;
        out.class_residuals["ZERO"] = n;
        return out;
    }
    const CubicTensor Chat = C * (1.0 / n);
    out.class_residuals["ZERO"] = 1.0;

    Eigen::SelfAdjointEigenSolver<Mat3> es(t_operator(Chat));
    const Vec3 q = es.eigenvalues();
    const Mat3 V = es.eigenvectors();

    const CubicClass order[5] = {CubicClass::ROT_SO2, CubicClass::TETRA_A4, CubicClass::TRI_S3,
                                 CubicClass::Z3_GENERIC, CubicClass::Z2_GENERIC};
    double best_seen = 1.0;
    for (CubicClass cls : order) {
        const Polished p = best_fit(cls, Chat, q, V);
        out.class_residuals[to_string(cls)] = p.fit.resid;
        best_seen = std::min(best_seen, p.fit.resid);
        if (p.fit.resid <= tol) {
            out.cls = cls;
            out.rotation = p.R;
            out.lambda = p.fit.lambda * n;
            out.mu = p.fit.mu * n;
            out.residual = p.fit.resid;
            return out;
        }
    }
    out.cls = CubicClass::NO_SYMMETRY;
    out.residual = best_seen;
    return out;
}

std::vector<Mat3> group_generators(Group g) {
    // Irrational angle so that no finite power is the identity.
    const double golden = 2.3999632297286533;
    switch (g) {
        case Group::SO3:
            return {axis_rotation(Vec3::UnitX(), golden), axis_rotation(Vec3::UnitY(), golden),
                    axis_rotation(Vec3::UnitZ(), golden)};
        case Group::Z2xSO2:
            return {axis_rotation(Vec3::UnitX(), golden), rot_P(2)};
        case Group::SO2:
            return {axis_rotation(Vec3::UnitX(), golden)};
        case Group::A4:
            return {rot_P(1), rot_P(2), rot_Q()};
        case Group::S3:
            return {rot_R(3), rot_P(1)};
        case Group::Z2xZ2:
            return {rot_P(1), rot_P(2)};
        case Group::Z3:
            return {rot_R(1)};
        case Group::Z2:
            return {rot_P(1)};
        case Group::TRIVIAL:
            return {};
    }
    return {};
}

std::vector<Mat3> group_sample(Group g, int n, uint64_t seed) {
    switch (g) {
        case Group::SO3: {
            RotationSampler rs(seed);
            std::vector<Mat3> out;
            for (int i = 0; i < n; ++i) out.push_back(rs.next());
            return out;
        }
        case Group::SO2:
        case Group::Z2xSO2: {
            RotationSampler rs(seed);
            std::vector<Mat3> out;
            for (int i = 0; i < n; ++i) {
                Mat3 r = axis_rotation(Vec3::UnitX(), 2.0 * kPi * rs.uniform());
                if (g == Group::Z2xSO2 && rs.uniform() < 0.5) r = r * rot_P(2);
                out.push_back(r);
            }
            return out;
        }
        default: {
            // Finite groups: full element list by closure of the generators.
            std::vector<Mat3> els{Mat3::Identity()};
            const auto gens = group_generators(g);
            bool grew = true;
            while (grew) {
                grew = false;
                for (size_t i = 0; i < els.size(); ++i)
                    for (const Mat3& h : gens) {
                        const Mat3 p = els[i] * h;
                        bool known = false;
                        for (const Mat3& e : els)
                            if ((e - p).norm() < 1e-9) {
                                known = true;
                                break;
                            }
                        if (!known) {
                            els.push_back(p);
                            grew = true;
                        }
                        if (els.size() > 64) throw Error("group closure did not terminate");
                    }
            }
            return els;
        }
    }
}

Mat3 conjugate_to_frame(const Mat3& g, const Mat3& R) {
    if (!is_special_orthogonal(g, 1e-10) || !is_special_orthogonal(R, 1e-10))
        throw Error("conjugate_to_frame: arguments must be rotations");
    return R * g * R.transpose();
}

double symmetry_residual(const CubicTensor& C, const Mat3& S, const Mat3& g) {
    if (!is_special_orthogonal(g, 1e-10)) throw Error("symmetry_residual: not a rotation");
    const double rc = (rotate_cubic(C, g) - C).norm() / (1.0 + C.norm());
    const double rs = (g.transpose() * S * g - S).norm() / (1.0 + S.norm());
    return std::max(rc, rs);
}

SymmetryReport stabilizer_pair(const CubicTensor& C, const Mat3& S, double tol) {
    SymmetryReport rep;
    const double n = C.norm();
    const CanonicalForm cf = classify_cubic(C, tol);
    rep.cls = cf.cls;
    rep.class_residuals = cf.class_residuals;
    rep.lambda = cf.lambda;
    rep.mu = cf.mu;
    rep.rotation = cf.rotation;

    const double sscale = 1.0 + S.norm();
    Mat3 Scan = cf.rotation.transpose() * S * cf.rotation;
    Scan = 0.5 * (Scan + Scan.transpose()).eval();

    // Misfit of the cubic hypotheses rejected before the accepted class.
    double margin = kInf;
    for (const char* name : {"ZERO", "ROT_SO2", "TETRA_A4", "TRI_S3", "Z3_GENERIC", "Z2_GENERIC"}) {
        if (std::string(name) == to_string(cf.cls)) break;
        const auto it = cf.class_residuals.find(name);
        if (it != cf.class_residuals.end()) margin = std::min(margin, it->second);
    }

    const double etol = std::max(tol, 10.0 * cf.residual);
    auto sres = [&](const Mat3& g) { return (g.transpose() * Scan * g - Scan).norm() / sscale; };
    auto fold_fails = [&](const std::vector<double>& rs) {
        for (double r : rs)
            if (r > etol) margin = std::min(margin, r);
    };
    auto finish = [&](Group g, const Mat3& R, double a, double b, double c, double d) {
        rep.group = g;
        rep.rotation = R;
        rep.a = a;
        rep.b = b;
        rep.c = c;
        rep.d = d;
        rep.margin = margin;
        double res = 0.0;
        for (const Mat3& gg : group_generators(g))
            res = std::max(res, symmetry_residual(C, S, conjugate_to_frame(gg, R)));
        rep.residual = res;
    };

    switch (cf.cls) {
        case CubicClass::ZERO: {
            Eigen::SelfAdjointEigenSolver<Mat3> es(Scan);
            const Vec3 s = es.eigenvalues();
            const Mat3 V = es.eigenvectors();
            const double sc = 1.0 + std::max(std::abs(s[0]), std::abs(s[2]));
            const bool e01 = s[1] - s[0] <= tol * sc;
            const bool e12 = s[2] - s[1] <= tol * sc;
            if (e01 && e12) {
                const double mean = s.sum() / 3.0;
                finish(Group::SO3, Mat3::Identity(), mean, mean, mean, 0.0);
            } else if (e01 || e12) {
                const int simple = e01 ? 2 : 0;
                const double dbl = e01 ? 0.5 * (s[0] + s[1]) : 0.5 * (s[1] + s[2]);
                margin = std::min(margin, (e01 ? s[2] - s[1] : s[1] - s[0]) / sc);
                finish(Group::Z2xSO2, frame_from_axis(fix_sign(V.col(simple))), s[simple], dbl, dbl, 0.0);
            } else {
                margin = std::min(margin, std::min(s[1] - s[0], s[2] - s[1]) / sc);
                Mat3 R;
                R.col(0) = fix_sign(V.col(2));
                R.col(1) = fix_sign(V.col(1));
                R.col(2) = R.col(0).cross(R.col(1));
                finish(Group::Z2xZ2, R, s[2], s[1], s[0], 0.0);
            }
            break;
        }
        case CubicClass::ROT_SO2: {
            const double coupling = std::sqrt(2.0) * std::hypot(Scan(0, 1), Scan(0, 2)) / sscale;
            Eigen::Matrix2d B2;
            B2 << Scan(1, 1), Scan(1, 2), Scan(2, 1), Scan(2, 2);
            const double anis =
                (B2 - 0.5 * B2.trace() * Eigen::Matrix2d::Identity()).norm() / sscale;
            if (coupling <= etol && anis <= etol) {
                const double bb = 0.5 * B2.trace();
                finish(Group::SO2, cf.rotation, Scan(0, 0), bb, bb, 0.0);
            } else if (coupling <= etol) {
                margin = std::min(margin, anis);
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es2(B2);
                Eigen::Vector2d vbig = es2.eigenvectors().col(1);
                if (std::abs(vbig[0]) >= std::abs(vbig[1]) ? vbig[0] < 0 : vbig[1] < 0) vbig = -vbig;
                const Mat3 R = cf.rotation * axis_rotation(Vec3::UnitX(), std::atan2(vbig[1], vbig[0]));
                const Mat3 Sf = R.transpose() * S * R;
                finish(Group::Z2, R, Sf(0, 0), Sf(1, 1), Sf(2, 2), Sf(1, 2));
            } else {
                margin = std::min(margin, coupling);
                finish(Group::TRIVIAL, cf.rotation, Scan(0, 0), Scan(1, 1), Scan(2, 2), Scan(1, 2));
            }
            break;
        }
        case CubicClass::TETRA_A4: {
            const Mat3 P[3] = {rot_P(1), rot_P(2), rot_P(3)};
            const Mat3 Q = rot_Q();
            const Mat3 qgen[4] = {Q, P[0] * Q * P[0], P[1] * Q * P[1], P[2] * Q * P[2]};
            const Vec3 diagonals[4] = {Vec3(1, 1, 1).normalized(), Vec3(1, -1, -1).normalized(),
                                       Vec3(-1, 1, -1).normalized(), Vec3(-1, -1, 1).normalized()};
            double rp[3], rq[4];
            for (int i = 0; i < 3; ++i) rp[i] = sres(P[i]);
            for (int i = 0; i < 4; ++i) rq[i] = sres(qgen[i]);
            const int np = (rp[0] <= etol) + (rp[1] <= etol) + (rp[2] <= etol);
            const int nq = (rq[0] <= etol) + (rq[1] <= etol) + (rq[2] <= etol) + (rq[3] <= etol);
            if (np == 3 && nq >= 1) {
                const double mean = Scan.trace() / 3.0;
                finish(Group::A4, cf.rotation, mean, mean, mean, 0.0);
            } else if (np >= 2) {
                if (np == 2) rep.ambiguous = true;
                fold_fails({rq[0], rq[1], rq[2], rq[3]});
                // Reorder axes by the cyclic rotations only: an odd permutation
                // would flip the sign of the xyz form.
                const Vec3 dg(Scan(0, 0), Scan(1, 1), Scan(2, 2));
                auto tup = [&](int k) {
                    return std::array<double, 3>{dg[(0 + k) % 3], dg[(1 + k) % 3], dg[(2 + k) % 3]};
                };
                // Dominant shape entry goes first (signed lexicographic order
                // breaks magnitude ties).
                auto better = [&](int k1, int k2) {
                    const auto t1 = tup(k1), t2 = tup(k2);
                    if (std::abs(t1[0]) != std::abs(t2[0]))
                        return std::abs(t1[0]) > std::abs(t2[0]);
                    return t1 > t2;
                };
                int bestk = 0;
                for (int k = 1; k < 3; ++k)
                    if (better(k, bestk)) bestk = k;
                Mat3 R = cf.rotation;
                for (int k = 0; k < bestk; ++k) R = R * Q;
                const Mat3 Sf = R.transpose() * S * R;
                finish(Group::Z2xZ2, R, Sf(0, 0), Sf(1, 1), Sf(2, 2), Sf(1, 2));
            } else if (nq >= 1) {
                // 3-fold boundary: re-present the cubic with the surviving
                // body diagonal as the rotation axis.
                fold_fails({rp[0], rp[1], rp[2], rq[0], rq[1], rq[2], rq[3]});
                int which = 0;
                for (int i = 1; i < 4; ++i)
                    if (rq[i] < rq[which]) which = i;
                const CubicTensor Ccan = rotate_cubic(C, cf.rotation);
                Vec3 ax = diagonals[which];
                if (cubic_eval(Ccan, ax) < 0) ax = -ax;
                Polished pz = polish_class(CubicClass::Z3_GENERIC, C * (1.0 / n),
                                           cf.rotation * z3_frame(Ccan, ax));
                canonicalize_in_class(CubicClass::Z3_GENERIC, pz, C * (1.0 / n));
                rep.lambda = pz.fit.lambda * n;
                rep.mu = pz.fit.mu * n;
                const Mat3 Sf = pz.R.transpose() * S * pz.R;
                const double t = 0.5 * (Sf(1, 1) + Sf(2, 2));
                finish(Group::Z3, pz.R, Sf(0, 0), t, t, 0.0);
            } else if (np == 1) {
                fold_fails({rp[0], rp[1], rp[2], rq[0], rq[1], rq[2], rq[3]});
                int which = rp[0] <= etol ? 0 : (rp[1] <= etol ? 1 : 2);
                Mat3 R = cf.rotation;
                for (int k = 0; k < which; ++k) R = R * Q;
                Polished pz = polish_class(CubicClass::Z2_GENERIC, C * (1.0 / n), R);
                rep.lambda = pz.fit.lambda * n;
                rep.mu = pz.fit.mu * n;
                Mat3 Rf = pz.R;
                if ((Rf.transpose() * S * Rf)(1, 2) < 0) Rf = Rf * rot_P(2);
                const Mat3 Sf = Rf.transpose() * S * Rf;
                finish(Group::Z2, Rf, Sf(0, 0), Sf(1, 1), Sf(2, 2), Sf(1, 2));
            } else {
                fold_fails({rp[0], rp[1], rp[2], rq[0], rq[1], rq[2], rq[3]});
                finish(Group::TRIVIAL, cf.rotation, Scan(0, 0), Scan(1, 1), Scan(2, 2), Scan(1, 2));
            }
            break;
        }
        case CubicClass::TRI_S3: {
            const Mat3 R3 = rot_R(3);
            const Mat3 flips[3] = {rot_P(1), R3 * rot_P(1) * R3.transpose(),
                                   R3 * R3 * rot_P(1) * (R3 * R3).transpose()};
            const double rr = sres(R3);
            double rf[3];
            for (int i = 0; i < 3; ++i) rf[i] = sres(flips[i]);
            const int nf = (rf[0] <= etol) + (rf[1] <= etol) + (rf[2] <= etol);
            if (rr <= etol && nf == 3) {
                const double t = 0.5 * (Scan(0, 0) + Scan(1, 1));
                finish(Group::S3, cf.rotation, t, t, Scan(2, 2), 0.0);
            } else if (nf >= 1) {
                if (nf > 1) rep.ambiguous = true;
                fold_fails({rr, rf[0], rf[1], rf[2]});
                int which = 0;
                for (int i = 1; i < 3; ++i)
                    if (rf[i] < rf[which]) which = i;
                Mat3 Rk = cf.rotation;
                for (int k = 0; k < which; ++k) Rk = Rk * R3;
                Mat3 R23;
                R23.col(0) = Vec3(1, 0, 0);
                R23.col(1) = Vec3(0, 1, 1).normalized();
                R23.col(2) = Vec3(0, -1, 1).normalized();
                Polished pz = polish_class(CubicClass::Z2_GENERIC, C * (1.0 / n), Rk * R23);
                canonicalize_in_class(CubicClass::Z2_GENERIC, pz, C * (1.0 / n));
                rep.lambda = pz.fit.lambda * n;
                rep.mu = pz.fit.mu * n;
                const Mat3 Sf = pz.R.transpose() * S * pz.R;
                finish(Group::Z2, pz.R, Sf(0, 0), Sf(1, 1), Sf(2, 2), Sf(1, 2));
            } else {
                fold_fails({rr, rf[0], rf[1], rf[2]});
                finish(Group::TRIVIAL, cf.rotation, Scan(0, 0), Scan(1, 1), Scan(2, 2), Scan(1, 2));
            }
            break;
        }
        case CubicClass::Z3_GENERIC: {
            const double rr = sres(rot_R(1));
            if (rr <= etol) {
                const double t = 0.5 * (Scan(1, 1) + Scan(2, 2));
                finish(Group::Z3, cf.rotation, Scan(0, 0), t, t, 0.0);
            } else {
                margin = std::min(margin, rr);
                finish(Group::TRIVIAL, cf.rotation, Scan(0, 0), Scan(1, 1), Scan(2, 2), Scan(1, 2));
            }
            break;
        }
        case CubicClass::Z2_GENERIC: {
            const double rr = sres(rot_P(1));
            if (rr <= etol) {
                finish(Group::Z2, cf.rotation, Scan(0, 0), Scan(1, 1), Scan(2, 2), Scan(1, 2));
            } else {
                margin = std::min(margin, rr);
                finish(Group::TRIVIAL, cf.rotation, Scan(0, 0), Scan(1, 1), Scan(2, 2), Scan(1, 2));
            }
            break;
        }
        case CubicClass::NO_SYMMETRY: {
            finish(Group::TRIVIAL, Mat3::Identity(), S(0, 0), S(1, 1), S(2, 2), S(1, 2));
            break;
        }
    }

    // Advisory cross-check: the sphere maximum of the fitted template must
    // match that of the input within the certified distance.
    if (cf.cls != CubicClass::ZERO && cf.cls != CubicClass::NO_SYMMETRY) {
        const double m1 = sphere_maximize(C).value;
        const double m2 = sphere_maximize(class_template(cf.cls, cf.lambda, cf.mu)).value;
        if (std::abs(m1 - m2) > 100.0 * tol * n + 1e-12) rep.ambiguous = true;
    }
    if (rep.margin < 10.0 * tol || cf.residual > 0.3 * tol) rep.ambiguous = true;
    return rep;
}

}  // namespace affsym
