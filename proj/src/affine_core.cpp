#include "affsym/affine_core.hpp"

#include <cmath>
#include <limits>

namespace affsym {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();

Mat4 split_matrix(const Jet& J, const Vec4& transversal) {
    Mat4 M;
    M.col(0) = J.d(1, 0, 0);
    M.col(1) = J.d(0, 1, 0);
    M.col(2) = J.d(0, 0, 1);
    M.col(3) = transversal;
    return M;
}

// Index pairs (i,j), i<=j, in the order the split solves them.
constexpr int kPairs[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};

Vec4 second_partial(const Jet& J, int i, int j) {
    int m[3] = {0, 0, 0};
    ++m[i];
    ++m[j];
    return J.d(m[0], m[1], m[2]);
}

Vec4 third_partial(const Jet& J, int i, int j, int k) {
    int m[3] = {0, 0, 0};
    ++m[i];
    ++m[j];
    ++m[k];
    return J.d(m[0], m[1], m[2]);
}
}  // namespace

int choose_tentative_axis(const Jet& jet) {
    // Euclidean orthonormal basis of the tangent plane.
    Eigen::Matrix<double, 4, 3> T = jet.tangents();
    Eigen::HouseholderQR<Eigen::Matrix<double, 4, 3>> qr(T);
    Eigen::Matrix<double, 4, 3> Q =
        qr.householderQ() * Eigen::Matrix<double, 4, 3>::Identity();
    int best = -1;
    double best_res = -1.0;
    for (int a = 3; a >= 0; --a) {  // tie preference e4, e3, e2, e1
        Vec4 e = Vec4::Zero();
        e[a] = 1.0;
        const double res = (e - Q * (Q.transpose() * e)).norm();
        if (res > best_res) {
            best_res = res;
            best = a;
        }
    }
    return best;
}

TentativeSplit tentative_split(const Jet& jet, const Vec4& transversal) {
    if (jet.order < 2) throw Error("tentative_split needs a jet of order >= 2");
    TentativeSplit out;
    out.transversal = transversal;
    Mat4 M = split_matrix(jet, transversal);
    const double scale = M.colwise().norm().prod();
    Eigen::PartialPivLU<Mat4> lu(M);
    out.omega = lu.determinant();
    if (std::abs(out.omega) <= 1e-12 * std::max(scale, 1e-300))
        throw Error("transversal lies in the tangent space");
    for (const auto& p : kPairs) {
        const int i = p[0], j = p[1];
        Vec4 y = lu.solve(second_partial(jet, i, j));
        for (int k = 0; k < 3; ++k) out.Gamma[k][i][j] = out.Gamma[k][j][i] = y[k];
        out.G(i, j) = out.G(j, i) = y[3];
    }
    return out;
}

TentativeSplit tentative_split(const Jet& jet, int axis) {
    Vec4 e = Vec4::Zero();
    e[axis] = 1.0;
    TentativeSplit out = tentative_split(jet, e);
    out.axis = axis;
    return out;
}

TentativeSplit tentative_split(const Jet& jet) {
    return tentative_split(jet, choose_tentative_axis(jet));
}

Mat3 affine_metric(const Mat3& G, double omega, int* sign_out) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(G);
    const Vec3 ev = es.eigenvalues();
    const double scale = std::max(std::abs(ev[0]), std::abs(ev[2]));
    if (scale <= 0.0 || std::min({std::abs(ev[0]), std::abs(ev[1]), std::abs(ev[2])}) <= 1e-10 * scale)
        throw Error("degenerate hypersurface: transversal form has rank < 3");
    if (ev[0] * ev[2] < 0.0)
        throw Error("indefinite affine metric: surface is not locally strongly convex");
    const int s = ev[0] > 0.0 ? 1 : -1;
    if (sign_out) *sign_out = s;
    const double det = G.determinant();
    const double pref = std::pow(std::abs(det), -0.2) * std::pow(std::abs(omega), 0.4);
    return pref * s * G;
}

MetricDerivs metric_with_derivs(const SurfaceSpec& surface, const Vec3& x, int axis) {
    const Jet J = jet(surface, x, 3);
    MetricDerivs out;
    out.split = tentative_split(J, axis);

    Mat4 M = split_matrix(J, out.split.transversal);
    Eigen::PartialPivLU<Mat4> lu(M);

    Mat3 dG[3];
    double domega[3];
    for (int k = 0; k < 3; ++k) {
        Mat4 dM = Mat4::Zero();
        dM.col(0) = second_partial(J, 0, k);
        dM.col(1) = second_partial(J, 1, k);
        dM.col(2) = second_partial(J, 2, k);
        // transversal column is a constant axis
        domega[k] = out.split.omega * (lu.solve(dM)).trace();
        dG[k] = Mat3::Zero();
        for (const auto& p : kPairs) {
            const int i = p[0], j = p[1];
            Vec4 y;
            y << out.split.Gamma[0][i][j], out.split.Gamma[1][i][j], out.split.Gamma[2][i][j],
                out.split.G(i, j);
            Vec4 dy = lu.solve(third_partial(J, i, j, k) - dM * y);
            dG[k](i, j) = dG[k](j, i) = dy[3];
        }
    }

    out.h = affine_metric(out.split.G, out.split.omega, &out.sign);
    out.h_inv = out.h.inverse();
    const Mat3 Ginv = out.split.G.inverse();
    const double pref =
        std::pow(std::abs(out.split.G.determinant()), -0.2) * std::pow(std::abs(out.split.omega), 0.4);
    for (int k = 0; k < 3; ++k) {
        const double tr = (Ginv * dG[k]).trace();
        out.dh[k] = pref * out.sign *
                    (dG[k] - 0.2 * tr * out.split.G + 0.4 * (domega[k] / out.split.omega) * out.split.G);
    }
    return out;
}

namespace {

void levi_civita(const MetricDerivs& md, double GammaHat[3][3][3]) {
    for (int m = 0; m < 3; ++m)
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                double acc = 0.0;
                for (int l = 0; l < 3; ++l)
                    acc += 0.5 * md.h_inv(m, l) * (md.dh[i](j, l) + md.dh[j](i, l) - md.dh[l](i, j));
                GammaHat[m][i][j] = GammaHat[m][j][i] = acc;
            }
}

Vec4 normal_from(const Jet& J, const MetricDerivs& md) {
    double GammaHat[3][3][3];
    levi_civita(md, GammaHat);
    Vec4 acc = Vec4::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Vec4 cov = second_partial(J, i, j);
            cov -= GammaHat[0][i][j] * J.d(1, 0, 0) + GammaHat[1][i][j] * J.d(0, 1, 0) +
                   GammaHat[2][i][j] * J.d(0, 0, 1);
            acc += md.h_inv(i, j) * cov;
        }
    return acc / 3.0;
}

}  // namespace

Vec4 blaschke_normal(const SurfaceSpec& surface, const Vec3& x, int axis) {
    const MetricDerivs md = metric_with_derivs(surface, x, axis);
    return normal_from(jet(surface, x, 3), md);
}

Mat3 orthonormalize(const Mat3& h, const Mat3& basis) {
    Mat3 B = basis;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < a; ++b) {
            const double proj = B.col(b).dot(h * B.col(a));
            B.col(a) -= proj * B.col(b);
        }
        const double n2 = B.col(a).dot(h * B.col(a));
        if (n2 <= 0.0) throw Error("orthonormalize: inner product not positive definite");
        B.col(a) /= std::sqrt(n2);
    }
    return B;
}

PointApparatus apparatus(const SurfaceSpec& surface, const Vec3& x) {
    const Jet probe = jet(surface, x, 2);
    return apparatus(surface, x, choose_tentative_axis(probe));
}

PointApparatus apparatus(const SurfaceSpec& surface, const Vec3& x, int axis) {
    PointApparatus app;
    app.tentative_axis = axis;
    app.jet = jet(surface, x, 3);
    const MetricDerivs md = metric_with_derivs(surface, x, axis);
    app.h = md.h;
    app.h_inv = md.h_inv;
    levi_civita(md, app.GammaHat);
    app.xi = normal_from(app.jet, md);

    // Re-split against the true normal; the transversal form must reproduce h.
    const TentativeSplit true_split = tentative_split(app.jet, app.xi);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                app.Gamma[k][i][j] = true_split.Gamma[k][i][j];
                app.K[k][i][j] = app.Gamma[k][i][j] - app.GammaHat[k][i][j];
            }
    app.diag.metric_consistency = (true_split.G - app.h).norm() / (1.0 + app.h.norm());

    // Shape operator: D_i xi = -S^k_i F_k, one Richardson central difference
    // of the (smooth, jet-exact) normal field.
    Mat4 N = split_matrix(app.jet, app.xi);
    Eigen::PartialPivLU<Mat4> lu(N);
    for (int i = 0; i < 3; ++i) {
        const double step = std::cbrt(kEps) * (1.0 + std::abs(x[i]));
        Vec4 dxi = richardson_central(
            [&](double xi_coord) {
                Vec3 p = x;
                p[i] = xi_coord;
                return blaschke_normal(surface, p, axis);
            },
            x[i], step);
        Vec4 w = lu.solve(dxi);
        app.S_coord.col(i) = -w.head<3>();
        app.diag.tangency =
            std::max(app.diag.tangency, std::abs(w[3]) / (1.0 + w.head<3>().norm()));
    }

    // h-orthonormal frame, oriented against xi.
    app.B = orthonormalize(app.h);
    app.frame = app.jet.tangents() * app.B;
    Mat4 Fr;
    Fr.block<4, 3>(0, 0) = app.frame;
    Fr.col(3) = app.xi;
    if (Fr.determinant() < 0.0) {
        app.B.col(2) *= -1.0;
        app.frame.col(2) *= -1.0;
        Fr.col(2) *= -1.0;
    }

    const double sqrt_det_h = std::sqrt(app.h.determinant());
    app.diag.volume_residual = std::abs(std::abs(true_split.omega) - sqrt_det_h) / sqrt_det_h;

    // Frame components of C and S.
    double Cc[3][3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                double acc = 0.0;
                for (int l = 0; l < 3; ++l) acc += app.K[l][i][j] * app.h(l, k);
                Cc[i][j][k] = acc;
            }
    double c_max = 0.0, c_asym = 0.0;
    auto frame_comp = [&](int p, int q, int r) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    acc += app.B(i, p) * app.B(j, q) * app.B(k, r) * Cc[i][j][k];
        return acc;
    };
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b)
            for (int c = b; c < 3; ++c) {
                // Cc is exactly symmetric in its first two slots, so the raw
                // values differ only by which index sits in the last slot.
                double vals[3];
                int n = 0;
                vals[n++] = frame_comp(a, b, c);
                if (b != c) vals[n++] = frame_comp(a, c, b);
                if (a != b) vals[n++] = frame_comp(b, c, a);
                double mean = 0.0;
                for (int m = 0; m < n; ++m) mean += vals[m];
                mean /= n;
                for (int m = 0; m < n; ++m) c_asym = std::max(c_asym, std::abs(vals[m] - mean));
                c_max = std::max(c_max, std::abs(mean));
                app.C.at(a, b, c) = mean;
            }
    app.diag.c_asym = c_asym / (1.0 + c_max);

    const Mat3 S_frame = app.B.inverse() * app.S_coord * app.B;
    app.diag.s_asym = (S_frame - S_frame.transpose()).norm() / (1.0 + S_frame.norm());
    app.S = 0.5 * (S_frame + S_frame.transpose());

    app.diag.apolarity = app.C.trace_vector().norm() / (1.0 + app.C.norm());
    return app;
}

}  // namespace affsym
