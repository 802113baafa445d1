#include "affsym/plane_sphere.hpp"

#include "affsym/jet.hpp"

#include <cmath>
#include <limits>

namespace affsym {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Metric data at one parameter point: h, its inverse, and exact
// first derivatives obtained by differentiating the linear solve.
struct MetricData2 {
    Mat2 h, h_inv;
    Mat2 dh[2];
};

MetricData2 metric2(const SphereSpec& s, double u, double v, int axis) {
    auto pp = [&](int du, int dv) { return s.partial(u, v, du, dv); };

    Mat3 M;
    M.col(0) = pp(1, 0);
    M.col(1) = pp(0, 1);
    M.col(2) = Vec3::Unit(axis);
    Eigen::PartialPivLU<Mat3> lu(M);
    const double omega = M.determinant();
    if (std::abs(omega) < 1e-14) throw Error("2D split: transversal in tangent plane");

    Mat2 G;
    double Gam[2][2][2];
    {
        Vec3 y = lu.solve(pp(2, 0));
        Gam[0][0][0] = y[0];
        Gam[1][0][0] = y[1];
        G(0, 0) = y[2];
        y = lu.solve(pp(1, 1));
        Gam[0][0][1] = Gam[0][1][0] = y[0];
        Gam[1][0][1] = Gam[1][1][0] = y[1];
        G(0, 1) = G(1, 0) = y[2];
        y = lu.solve(pp(0, 2));
        Gam[0][1][1] = y[0];
        Gam[1][1][1] = y[1];
        G(1, 1) = y[2];
    }

    Eigen::SelfAdjointEigenSolver<Mat2> es(G);
    if (es.eigenvalues()(0) * es.eigenvalues()(1) <= 0.0)
        throw Error("2D metric degenerate or indefinite");
    const int sg = es.eigenvalues()(0) > 0 ? 1 : -1;
    const double pref = std::pow(std::abs(G.determinant()), -0.25) * std::sqrt(std::abs(omega));

    MetricData2 md;
    md.h = pref * sg * G;
    md.h_inv = md.h.inverse();

    const Mat2 Ginv = G.inverse();
    for (int k = 0; k < 2; ++k) {
        Mat3 dM = Mat3::Zero();
        dM.col(0) = k == 0 ? pp(2, 0) : pp(1, 1);
        dM.col(1) = k == 0 ? pp(1, 1) : pp(0, 2);
        const double domega = omega * lu.solve(dM).trace();
        Mat2 dG;
        const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
        for (auto& p : pairs) {
            const int i = p[0], j = p[1];
            Vec3 y(Gam[0][i][j], Gam[1][i][j], G(i, j));
            const Vec3 third = pp((i == 0) + (j == 0) + (k == 0), (i == 1) + (j == 1) + (k == 1));
            const Vec3 dy = lu.solve(third - dM * y);
            dG(i, j) = dG(j, i) = dy[2];
        }
        md.dh[k] = pref * sg * (dG - 0.25 * (Ginv * dG).trace() * G + 0.5 * (domega / omega) * G);
    }
    return md;
}

Vec3 normal2(const SphereSpec& s, double u, double v, int axis) {
    const MetricData2 md = metric2(s, u, v, axis);
    double GH[2][2][2];
    for (int m = 0; m < 2; ++m)
        for (int i = 0; i < 2; ++i)
            for (int j = i; j < 2; ++j) {
                double acc = 0.0;
                for (int l = 0; l < 2; ++l)
                    acc += 0.5 * md.h_inv(m, l) * (md.dh[i](j, l) + md.dh[j](i, l) - md.dh[l](i, j));
                GH[m][i][j] = GH[m][j][i] = acc;
            }
    Vec3 acc = Vec3::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Vec3 cov = s.partial(u, v, (i == 0) + (j == 0), (i == 1) + (j == 1));
            cov -= GH[0][i][j] * s.partial(u, v, 1, 0) + GH[1][i][j] * s.partial(u, v, 0, 1);
            acc += md.h_inv(i, j) * cov;
        }
    return acc / 2.0;
}

}  // namespace

PlaneApparatus plane_apparatus(const SphereSpec& sphere, double u, double v) {
    const Vec3 pu = sphere.partial(u, v, 1, 0);
    const Vec3 pv = sphere.partial(u, v, 0, 1);
    const Vec3 n = pu.cross(pv);
    int axis = 2;
    double best = -1.0;
    for (int a = 2; a >= 0; --a)
        if (std::abs(n[a]) > best) {
            best = std::abs(n[a]);
            axis = a;
        }

    PlaneApparatus out;
    const MetricData2 md = metric2(sphere, u, v, axis);
    out.h = md.h;
    out.xi = normal2(sphere, u, v, axis);

    Mat3 N;
    N.col(0) = pu;
    N.col(1) = pv;
    N.col(2) = out.xi;
    const double vol = std::sqrt(out.h.determinant());
    out.volume_residual = std::abs(std::abs(N.determinant()) - vol) / vol;

    Eigen::PartialPivLU<Mat3> lu(N);
    for (int i = 0; i < 2; ++i) {
        const double c0 = i == 0 ? u : v;
        const double step = std::cbrt(kEps) * (1.0 + std::abs(c0));
        const Vec3 dxi = richardson_central(
            [&](double c) { return i == 0 ? normal2(sphere, c, v, axis) : normal2(sphere, u, c, axis); }, c0,
            step);
        const Vec3 w = lu.solve(dxi);
        out.S.col(i) = -w.head<2>();
    }
    const Mat2 Sh = out.h * out.S;
    out.s_asym = (Sh - Sh.transpose()).norm() / (1.0 + Sh.norm());
    out.H = 0.5 * out.S.trace();
    return out;
}

}  // namespace affsym
