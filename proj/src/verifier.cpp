#include "affsym/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace affsym {
namespace {

// Fields of the apparatus in parameter coordinates. Residuals are assembled
// from these values only, so a fault applied here is exactly what each check
// sees at the evaluation point.
struct Fields {
    Mat3 h = Mat3::Zero();
    Mat3 h_inv = Mat3::Zero();
    Mat3 S = Mat3::Zero();
    double C[3][3][3] = {};   // C_ijk = h(K(d_i, d_j), d_k)
    double G[3][3][3] = {};   // Gamma^k_ij as [k][i][j]
    double Gh[3][3][3] = {};  // Levi-Civita of h
    double vol_lhs = 0.0;     // |det(F_1, F_2, F_3, xi)|
};

Fields eval_fields(const SurfaceSpec& surface, const Vec3& x, int axis) {
    const PointApparatus ap = apparatus(surface, x, axis);
    Fields f;
    f.h = ap.h;
    f.h_inv = ap.h_inv;
    f.S = ap.S_coord;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                double acc = 0.0;
                for (int l = 0; l < 3; ++l) acc += ap.h(k, l) * ap.K[l][i][j];
                f.C[i][j][k] = acc;
            }
    std::memcpy(f.G, ap.Gamma, sizeof f.G);
    std::memcpy(f.Gh, ap.GammaHat, sizeof f.Gh);
    Eigen::Matrix4d m;
    m.leftCols<3>() = ap.jet.tangents();
    m.col(3) = ap.xi;
    f.vol_lhs = std::abs(m.determinant());
    return f;
}

double cube_norm(const double t[3][3][3]) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) s += t[i][j][k] * t[i][j][k];
    return std::sqrt(s);
}

void apply_fault(Fields& f, const Fault& fault) {
    if (fault.target.empty()) return;
    RotationSampler rng(fault.seed ? fault.seed : 1);
    auto noise = [&rng] { return 2.0 * rng.uniform() - 1.0; };
    const double m = fault.magnitude;
    if (fault.target == "h") {
        const double s = m * (1.0 + f.h.norm());
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                const double d = s * noise();
                f.h(i, j) += d;
                if (i != j) f.h(j, i) += d;
            }
        f.h_inv = f.h.inverse();
    } else if (fault.target == "S") {
        const double s = m * (1.0 + f.S.norm());
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) f.S(i, j) += s * noise();
    } else if (fault.target == "C") {
        const double s = m * (1.0 + cube_norm(f.C));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) f.C[i][j][k] += s * noise();
    } else if (fault.target == "Gamma") {
        const double s = m * (1.0 + cube_norm(f.G));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) f.G[i][j][k] += s * noise();
    } else if (fault.target == "GammaHat") {
        const double s = m * (1.0 + cube_norm(f.Gh));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) f.Gh[i][j][k] += s * noise();
    } else if (fault.target == "xi") {
        f.vol_lhs *= 1.0 + m * (1.0 + std::abs(noise()));
    } else {
        throw Error("unknown fault target: " + fault.target);
    }
}

}  // namespace

const ResidualRecord* FundamentalReport::find(const std::string& name) const {
    for (const auto& r : records)
        if (r.name == name) return &r;
    return nullptr;
}

FundamentalReport check_fundamental(const SurfaceSpec& surface, const Vec3& x,
                                    const FundamentalOptions& opts) {
    FundamentalReport rep;
    rep.point = x;

    for (int m = 0; m < 3; ++m) {
        Vec3 e = Vec3::Zero();
        e[m] = opts.fd_step;
        if (!surface.in_domain(x + e) || !surface.in_domain(x - e))
            throw Error("finite-difference stencil leaves the surface domain");
    }

    const int axis = choose_tentative_axis(jet(surface, x, 2));
    Fields f = eval_fields(surface, x, axis);
    apply_fault(f, opts.fault);

    // One-sided fields at the stencil points stay clean; Richardson-combined
    // first derivatives of Gamma, GammaHat, S and C along each coordinate.
    double dG[3][3][3][3];   // [m][k][i][j]
    double dGh[3][3][3][3];  // [m][k][i][j]
    double dS[3][3][3];      // [m](l, j)
    double dC[3][3][3][3];   // [m][i][j][k]
    const double step = opts.fd_step;
    for (int m = 0; m < 3; ++m) {
        Vec3 e = Vec3::Zero();
        e[m] = 1.0;
        const Fields fp = eval_fields(surface, x + step * e, axis);
        const Fields fm = eval_fields(surface, x - step * e, axis);
        const Fields fp2 = eval_fields(surface, x + (step / 2) * e, axis);
        const Fields fm2 = eval_fields(surface, x - (step / 2) * e, axis);
        auto rich = [&](double vp, double vm, double vp2, double vm2) {
            return (4.0 * (vp2 - vm2) / step - (vp - vm) / (2.0 * step)) / 3.0;
        };
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                dS[m][i][j] = rich(fp.S(i, j), fm.S(i, j), fp2.S(i, j), fm2.S(i, j));
                for (int k = 0; k < 3; ++k) {
                    dG[m][i][j][k] = rich(fp.G[i][j][k], fm.G[i][j][k], fp2.G[i][j][k],
                                          fm2.G[i][j][k]);
                    dGh[m][i][j][k] = rich(fp.Gh[i][j][k], fm.Gh[i][j][k], fp2.Gh[i][j][k],
                                           fm2.Gh[i][j][k]);
                    dC[m][i][j][k] = rich(fp.C[i][j][k], fm.C[i][j][k], fp2.C[i][j][k],
                                          fm2.C[i][j][k]);
                }
            }
    }

    auto push = [&rep](const std::string& name, double num, double den, double tol) {
        ResidualRecord r;
        r.name = name;
        r.scale = 1.0 + den;
        r.value = num / r.scale;
        r.tolerance = tol;
        r.pass = r.value <= tol;
        rep.pass = rep.pass && r.pass;
        rep.records.push_back(std::move(r));
    };

    const Mat3 hS = f.h * f.S;

    // Curvature of the induced connection against h(Y,Z) SX - h(X,Z) SY.
    {
        double num = 0.0, den = 0.0;
        for (int l = 0; l < 3; ++l)
            for (int k = 0; k < 3; ++k)
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        double r = dG[i][l][j][k] - dG[j][l][i][k];
                        for (int m = 0; m < 3; ++m)
                            r += f.G[l][i][m] * f.G[m][j][k] - f.G[l][j][m] * f.G[m][i][k];
                        const double e = f.h(j, k) * f.S(l, i) - f.h(i, k) * f.S(l, j);
                        num += (r - e) * (r - e);
                        den += e * e;
                    }
        push("gauss_nabla", std::sqrt(num), std::sqrt(den), opts.tol_derivative);
    }

    // Antisymmetrized hat-derivative of C against the shape-operator pattern.
    {
        double nc[3][3][3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        double v = dC[i][j][k][l];
                        for (int m = 0; m < 3; ++m)
                            v -= f.Gh[m][i][j] * f.C[m][k][l] + f.Gh[m][i][k] * f.C[j][m][l] +
                                 f.Gh[m][i][l] * f.C[j][k][m];
                        nc[i][j][k][l] = v;
                    }
        double num = 0.0, den = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        const double t = nc[i][j][k][l] - nc[j][i][k][l];
                        // Factor 1/2 because C here is h(K.,.), not the
                        // metric-derivative cubic which is -2 of it.
                        const double e = -0.5 * (f.h(i, k) * hS(j, l) - f.h(j, k) * hS(i, l) +
                                                 hS(j, k) * f.h(i, l) - hS(i, k) * f.h(j, l));
                        num += (t - e) * (t - e);
                        den += e * e;
                    }
        push("codazzi_c", std::sqrt(num), std::sqrt(den), opts.tol_derivative);
    }

    // Symmetry of the covariant derivative of S in the induced connection.
    {
        double a[3][3][3];
        double den = 0.0;
        for (int l = 0; l < 3; ++l)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double v = dS[i][l][j];
                    for (int m = 0; m < 3; ++m)
                        v += f.G[l][i][m] * f.S(m, j) - f.G[m][i][j] * f.S(l, m);
                    a[l][i][j] = v;
                    den += v * v;
                }
        double num = 0.0;
        for (int l = 0; l < 3; ++l)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const double t = a[l][i][j] - a[l][j][i];
                    num += t * t;
                }
        push("codazzi_s", std::sqrt(num), std::sqrt(den), opts.tol_derivative);
    }

    // Curvature of the Levi-Civita connection of h against the symmetrized
    // shape pattern minus the commutator of difference-tensor operators.
    {
        double kk[3][3][3];  // K^l_ij
        for (int l = 0; l < 3; ++l)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) kk[l][i][j] = f.G[l][i][j] - f.Gh[l][i][j];
        double num = 0.0, den = 0.0;
        for (int l = 0; l < 3; ++l)
            for (int k = 0; k < 3; ++k)
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        double r = dGh[i][l][j][k] - dGh[j][l][i][k];
                        for (int m = 0; m < 3; ++m)
                            r += f.Gh[l][i][m] * f.Gh[m][j][k] - f.Gh[l][j][m] * f.Gh[m][i][k];
                        double e = 0.5 * (f.h(j, k) * f.S(l, i) - f.h(i, k) * f.S(l, j) +
                                          hS(j, k) * (l == i) - hS(i, k) * (l == j));
                        for (int m = 0; m < 3; ++m)
                            e -= kk[l][i][m] * kk[m][j][k] - kk[l][j][m] * kk[m][i][k];
                        num += (r - e) * (r - e);
                        den += e * e;
                    }
        push("gauss_hat", std::sqrt(num), std::sqrt(den), opts.tol_derivative);
    }

    push("s_symmetry", (hS - hS.transpose()).norm(), hS.norm(), opts.tol_pointwise);

    {
        double worst = 0.0;
        for (int k = 0; k < 3; ++k) {
            double tr = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) tr += f.h_inv(i, j) * f.C[i][j][k];
            worst = std::max(worst, std::abs(tr));
        }
        push("apolarity", worst, cube_norm(f.C), opts.tol_pointwise);
    }

    {
        const double root = std::sqrt(f.h.determinant());
        ResidualRecord r;
        r.name = "volume";
        r.scale = root;
        r.value = std::abs(f.vol_lhs - root) / root;
        r.tolerance = opts.tol_pointwise;
        r.pass = r.value <= r.tolerance;
        rep.pass = rep.pass && r.pass;
        rep.records.push_back(std::move(r));
    }

    return rep;
}

// ---------------------------------------------------------------------------
// Adapted frames

namespace {

void apply_gauge(AdaptedFrame& f, const Mat3& g) {
    f.frame = (f.frame * g).eval();
    f.B = (f.B * g).eval();
    f.C = rotate_cubic(f.C, g);
    f.S = (g.transpose() * f.S * g).eval();
    f.report.rotation = (f.report.rotation * g).eval();
}

void align_gauge(AdaptedFrame& f, const AdaptedFrame& ref) {
    std::vector<Mat3> cands;
    switch (f.report.group) {
        case Group::TRIVIAL:
        case Group::SO2:
        case Group::SO3:
            break;
        case Group::Z2xSO2:
            cands.push_back(rot_P(2));
            break;
        default:
            cands = group_sample(f.report.group, 64, 1);
            break;
    }
    Mat3 best = Mat3::Identity();
    double best_gap = (f.frame - ref.frame).norm();
    for (const Mat3& g : cands) {
        const double gap = (f.frame * g - ref.frame).norm();
        if (gap < best_gap) {
            best_gap = gap;
            best = g;
        }
    }
    if ((best - Mat3::Identity()).norm() > 0) apply_gauge(f, best);

    if (f.report.group == Group::SO3) {
        const Mat3 m = f.frame.transpose() * ref.frame;
        Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Mat3 u = svd.matrixU();
        if ((u * svd.matrixV().transpose()).determinant() < 0) u.col(2) *= -1.0;
        apply_gauge(f, u * svd.matrixV().transpose());
    } else if (f.report.group == Group::SO2 || f.report.group == Group::Z2xSO2) {
        const auto& t = f.frame;
        const auto& r = ref.frame;
        const double ca = t.col(1).dot(r.col(1)) + t.col(2).dot(r.col(2));
        const double sa = t.col(2).dot(r.col(1)) - t.col(1).dot(r.col(2));
        const double psi = std::atan2(sa, ca);
        if (psi != 0.0) apply_gauge(f, axis_rotation(Vec3::UnitX(), psi));
    }
}

AdaptedFrame adapted_basic(const SurfaceSpec& surface, const Vec3& x, int axis) {
    const PointApparatus ap = axis < 0 ? apparatus(surface, x) : apparatus(surface, x, axis);
    AdaptedFrame f;
    f.x = x;
    f.tentative_axis = ap.tentative_axis;
    f.report = stabilizer_pair(ap.C, ap.S);
    const Mat3 r = f.report.rotation;
    f.B = ap.B * r;
    f.frame = ap.frame * r;
    f.h = ap.h;
    f.xi = ap.xi;
    f.C = rotate_cubic(ap.C, r);
    f.S = (r.transpose() * ap.S * r).eval();

    // Three-axis points: order the frame so the dominant shape-operator
    // diagonal entry sits on e1. Each cyclic turn shifts the diagonal left.
    if (f.report.group == Group::Z2xZ2 && f.report.cls == CubicClass::TETRA_A4) {
        int k = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(f.S(i, i)) > std::abs(f.S(k, k))) k = i;
        for (int n = 0; n < k; ++n) apply_gauge(f, rot_Q());
    }

    f.sigma = (f.h * f.B.col(0))(0) >= 0.0 ? 1.0 : -1.0;
    return f;
}

}  // namespace

AdaptedFrame adapted_frame(const SurfaceSpec& surface, const Vec3& x,
                           const AdaptedFrame* reference) {
    AdaptedFrame f = adapted_basic(surface, x, -1);
    if (reference) align_gauge(f, *reference);

    const double step = 1e-3;
    Eigen::Matrix4d m;
    m.leftCols<3>() = f.frame;
    m.col(3) = f.xi;
    const auto lu = m.partialPivLu();
    for (int a = 0; a < 3; ++a) {
        const Vec3 dir = f.B.col(a);
        auto frame_at = [&](double off) {
            AdaptedFrame g = adapted_basic(surface, x + off * dir, f.tentative_axis);
            align_gauge(g, f);
            return g.frame;
        };
        const Eigen::Matrix<double, 4, 3> d =
            (4.0 * (frame_at(step / 2) - frame_at(-step / 2)) / step -
             (frame_at(step) - frame_at(-step)) / (2.0 * step)) /
            3.0;
        for (int b = 0; b < 3; ++b) {
            const Vec4 cf = lu.solve(d.col(b));
            for (int c = 0; c < 3; ++c) f.phi_hat[a][b][c] = cf[c] - f.C(a, b, c);
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// Structure functions along the curve direction

const char* to_string(WarpedCase c) {
    switch (c) {
        case WarpedCase::NOT_WARPED: return "NOT_WARPED";
        case WarpedCase::NU_ZERO_LAMBDA_EQ_ETA: return "NU_ZERO_LAMBDA_EQ_ETA";
        case WarpedCase::NU_ZERO_LAMBDA_NEQ_ETA: return "NU_ZERO_LAMBDA_NEQ_ETA";
        case WarpedCase::NU_NONZERO: return "NU_NONZERO";
    }
    return "NOT_WARPED";
}

namespace {

struct LineSample {
    double a = 0, b = 0, lambda = 0, mu = 0, eta = 0;
    double rate = 0;       // d s / d t, signed along e1
    double axis_gap = 0;   // how far e1 is from the t-direction
    CubicClass cls = CubicClass::NO_SYMMETRY;
};

LineSample line_sample(const SurfaceSpec& surface, const Vec3& x, const AdaptedFrame* ref,
                       AdaptedFrame* keep = nullptr) {
    AdaptedFrame f = adapted_frame(surface, x, ref);
    LineSample s;
    s.cls = f.report.cls;
    s.a = f.S(0, 0);
    s.b = 0.5 * (f.S(1, 1) + f.S(2, 2));
    s.lambda = f.report.lambda;
    s.mu = f.report.mu;
    // Sign convention: eta > 0 when the cross-section frame vectors bend
    // away from the axis direction; this is the orientation under which
    // exp(2f)*nu stays constant along the line.
    s.eta = -0.5 * (f.phi_hat[1][1][0] + f.phi_hat[2][2][0]);
    const double root = std::sqrt(f.h(0, 0));
    s.rate = f.sigma * root;
    // e1 in coordinates should be sigma/sqrt(h00) * d_t.
    Vec3 ideal = Vec3::Zero();
    ideal[0] = f.sigma / root;
    s.axis_gap = (f.B.col(0) - ideal).norm() * root;
    if (keep) *keep = std::move(f);
    return s;
}

}  // namespace

StructureReport check_structure(const SurfaceSpec& surface, int n_points, double tol) {
    if (n_points < 5) throw Error("check_structure needs at least 5 samples");
    StructureReport rep;
    const auto& dom = surface.domain;
    const double u0 = dom[1][0] + 0.655 * (dom[1][1] - dom[1][0]);
    const double v0 = dom[2][0] + 0.265 * (dom[2][1] - dom[2][0]);
    rep.base = Vec3(dom[0][0], u0, v0);

    rep.t.resize(n_points);
    for (int i = 0; i < n_points; ++i)
        rep.t[i] = dom[0][0] + (dom[0][1] - dom[0][0]) * i / (n_points - 1);

    const int n = n_points;
    rep.a.resize(n);
    rep.b.resize(n);
    rep.lambda.resize(n);
    rep.mu.resize(n);
    rep.eta.resize(n);
    rep.nu.resize(n);
    rep.f.resize(n);
    rep.curvature.resize(n);

    std::vector<AdaptedFrame> frames(n);
    std::vector<LineSample> centers(n);
    bool rotational = true;
    for (int i = 0; i < n; ++i) {
        centers[i] = line_sample(surface, Vec3(rep.t[i], u0, v0), nullptr, &frames[i]);
        rotational = rotational && (centers[i].cls == CubicClass::ROT_SO2 ||
                                    centers[i].cls == CubicClass::Z3_GENERIC);
    }
    if (!rotational) {
        rep.case_label = WarpedCase::NOT_WARPED;
        rep.records.push_back({"rotational_class", 1.0, 1.0, 0.5, false});
        rep.pass = false;
        return rep;
    }

    // ODE residuals: derivative of each field along e1 versus the announced
    // right-hand side. The outer step is coarse because the fields vary on
    // the scale of the domain while each sample carries ~1e-8 noise.
    const double dstep = 1e-2;
    double worst[4] = {0, 0, 0, 0};
    double axis_gap = 0.0;
    double field_scale = 0.0;
    for (int i = 0; i < n; ++i) {
        const LineSample& c = centers[i];
        auto at = [&](double dt) { return line_sample(surface, Vec3(rep.t[i] + dt, u0, v0), &frames[i]); };
        const LineSample sp = at(dstep), sm = at(-dstep), sp2 = at(dstep / 2), sm2 = at(-dstep / 2);
        auto d1 = [&](double LineSample::* f) {
            const double full = (sp.*f - sm.*f) / (2.0 * dstep);
            const double half = (sp2.*f - sm2.*f) / dstep;
            return (4.0 * half - full) / (3.0 * c.rate);
        };
        const double e1b = d1(&LineSample::b);
        const double e1eta = d1(&LineSample::eta);
        const double e1l = d1(&LineSample::lambda);
        const double e1m = d1(&LineSample::mu);

        worst[0] = std::max(worst[0], std::abs(e1b - (c.lambda - c.eta) * (c.b - c.a)));
        worst[1] = std::max(worst[1],
                            std::abs(e1eta + c.eta * c.eta + 3.0 * c.lambda * c.lambda +
                                     0.5 * (c.a + c.b)));
        worst[2] = std::max(worst[2], std::abs(e1l + 4.0 * c.lambda * c.eta + 0.5 * (c.a - c.b)));
        worst[3] = std::max(worst[3], std::abs(e1m + c.mu * c.eta));
        axis_gap = std::max(axis_gap, c.axis_gap);
        field_scale = std::max({field_scale, std::abs(c.a), std::abs(c.b), c.lambda, c.mu,
                                std::abs(c.eta)});

        rep.a[i] = c.a;
        rep.b[i] = c.b;
        rep.lambda[i] = c.lambda;
        rep.mu[i] = c.mu;
        rep.eta[i] = c.eta;
        // Trichotomy invariant; the conserved curvature below adds 2*mu^2.
        rep.nu[i] = c.b + c.eta * c.eta - c.lambda * c.lambda;
    }

    // Transverse constancy: the scalar fields may vary only along the axis.
    {
        const int mid = n / 2;
        const double du = 0.05 * (dom[1][1] - dom[1][0]);
        const double dv = 0.05 * (dom[2][1] - dom[2][0]);
        const LineSample& c = centers[mid];
        double dev = 0.0;
        for (const Vec3& q : {Vec3(rep.t[mid], u0 + du, v0), Vec3(rep.t[mid], u0 - du, v0),
                              Vec3(rep.t[mid], u0, v0 + dv), Vec3(rep.t[mid], u0, v0 - dv)}) {
            const LineSample s = line_sample(surface, q, &frames[mid]);
            dev = std::max({dev, std::abs(s.a - c.a), std::abs(s.b - c.b),
                            std::abs(s.lambda - c.lambda), std::abs(s.eta - c.eta)});
        }
        rep.transverse_dev = dev;
    }

    // log-warp f from df/dt = eta * ds/dt, Runge-Kutta over the sample line.
    rep.f[0] = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double dt = rep.t[i + 1] - rep.t[i];
        const LineSample mid =
            line_sample(surface, Vec3(0.5 * (rep.t[i] + rep.t[i + 1]), u0, v0), &frames[i]);
        const double k1 = centers[i].eta * centers[i].rate;
        const double k2 = mid.eta * mid.rate;
        const double k4 = centers[i + 1].eta * centers[i + 1].rate;
        rep.f[i + 1] = rep.f[i] + dt * (k1 + 4.0 * k2 + k4) / 6.0;
    }
    for (int i = 0; i < n; ++i)
        rep.curvature[i] =
            std::exp(2.0 * rep.f[i]) * (rep.nu[i] + 2.0 * rep.mu[i] * rep.mu[i]);

    const double scale = 1.0 + field_scale * field_scale;
    auto push = [&](const std::string& name, double value, double tolerance) {
        ResidualRecord r;
        r.name = name;
        r.scale = scale;
        r.value = value / scale;
        r.tolerance = tolerance;
        r.pass = r.value <= tolerance;
        rep.pass = rep.pass && r.pass;
        rep.records.push_back(std::move(r));
    };
    push("axis_alignment", axis_gap, tol);
    push("transverse_constancy", rep.transverse_dev, tol);
    push("ode_b", worst[0], tol);
    push("ode_eta", worst[1], tol);
    push("ode_lambda", worst[2], tol);
    push("ode_mu", worst[3], tol);

    double cur_max = 0.0;
    for (double c : rep.curvature) cur_max = std::max(cur_max, std::abs(c));
    const double spread =
        *std::max_element(rep.curvature.begin(), rep.curvature.end()) -
        *std::min_element(rep.curvature.begin(), rep.curvature.end());
    {
        ResidualRecord r;
        r.name = "curvature_constancy";
        r.scale = 1.0 + cur_max;
        r.value = spread / r.scale;
        r.tolerance = tol;
        r.pass = r.value <= tol;
        rep.pass = rep.pass && r.pass;
        rep.records.push_back(std::move(r));
    }

    // Case split on nu and lambda - eta.
    const double eps0 = 10.0 * tol * scale;
    double nu_max = 0.0, nu_min = std::numeric_limits<double>::infinity();
    double gap_max = 0.0, gap_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        nu_max = std::max(nu_max, std::abs(rep.nu[i]));
        nu_min = std::min(nu_min, std::abs(rep.nu[i]));
        const double g = std::abs(rep.lambda[i] - rep.eta[i]);
        gap_max = std::max(gap_max, g);
        gap_min = std::min(gap_min, g);
    }
    if (nu_max <= eps0) {
        rep.case_label = gap_max <= eps0 ? WarpedCase::NU_ZERO_LAMBDA_EQ_ETA
                                         : WarpedCase::NU_ZERO_LAMBDA_NEQ_ETA;
        rep.dichotomy_ok = gap_max <= eps0 || gap_min > gap_max / 100.0;
    } else {
        rep.case_label = WarpedCase::NU_NONZERO;
        rep.dichotomy_ok = nu_min > nu_max / 100.0;
    }
    rep.pass = rep.pass && rep.dichotomy_ok;
    return rep;
}

// ---------------------------------------------------------------------------
// Grid scans

namespace {

int scan_threads() {
#ifdef _OPENMP
    if (const char* env = std::getenv("AFFSYM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return omp_get_max_threads();
#else
    return 1;
#endif
}

ScanResult scan_impl(const SurfaceSpec& surface, const std::array<int, 3>& grid, double tol,
                     bool parallel) {
    for (int g : grid)
        if (g < 1) throw Error("scan grid must be positive in every direction");
    ScanResult res;
    res.grid = grid;
    res.tol = tol;
    const int total = grid[0] * grid[1] * grid[2];
    res.points.resize(total);

    const int threads = parallel ? scan_threads() : 1;
    (void)threads;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (parallel && threads > 1)
#endif
    for (int idx = 0; idx < total; ++idx) {
        const int k = idx % grid[2];
        const int j = (idx / grid[2]) % grid[1];
        const int i = idx / (grid[2] * grid[1]);
        Vec3 x;
        const int ijk[3] = {i, j, k};
        for (int d = 0; d < 3; ++d) {
            const auto& lim = surface.domain[d];
            x[d] = grid[d] == 1 ? 0.5 * (lim[0] + lim[1])
                                : lim[0] + (lim[1] - lim[0]) * ijk[d] / (grid[d] - 1.0);
        }
        ScanPoint& p = res.points[idx];
        p.x = x;
        try {
            const PointApparatus ap = apparatus(surface, x);
            const SymmetryReport r = stabilizer_pair(ap.C, ap.S, tol);
            p.group = r.group;
            p.cls = r.cls;
            p.lambda = r.lambda;
            p.mu = r.mu;
            p.a = r.a;
            p.b = r.b;
            p.c = r.c;
            p.d = r.d;
            p.residual = r.residual;
            p.margin = r.margin;
            p.ambiguous = r.ambiguous;
            p.c_norm = ap.C.norm();
            p.apolarity = ap.diag.apolarity;
            p.volume_residual = ap.diag.volume_residual;
            p.s_asym = ap.diag.s_asym;
        } catch (const std::exception& e) {
            p.valid = false;
            p.error = e.what();
        }
    }
    return res;
}

}  // namespace

ScanResult scan(const SurfaceSpec& surface, const std::array<int, 3>& grid, double tol) {
    return scan_impl(surface, grid, tol, true);
}

ScanResult scan_serial(const SurfaceSpec& surface, const std::array<int, 3>& grid, double tol) {
    return scan_impl(surface, grid, tol, false);
}

}  // namespace affsym
