#include "doctest.h"

#include "affsym/catalog.hpp"
#include "affsym/verifier.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <set>
#include <vector>

using namespace affsym;

namespace {

const char* kChecks[] = {"gauss_nabla", "codazzi_c",  "codazzi_s", "gauss_hat",
                         "s_symmetry",  "apolarity",  "volume"};

bool same_points(const ScanResult& lhs, const ScanResult& rhs) {
    if (lhs.points.size() != rhs.points.size()) return false;
    for (size_t i = 0; i < lhs.points.size(); ++i) {
        const ScanPoint& a = lhs.points[i];
        const ScanPoint& b = rhs.points[i];
        const bool fields =
            a.valid == b.valid && a.error == b.error && a.group == b.group &&
            a.cls == b.cls && a.ambiguous == b.ambiguous;
        auto bits = [](double x, double y) {
            return std::memcmp(&x, &y, sizeof x) == 0;
        };
        if (!fields || !bits(a.lambda, b.lambda) || !bits(a.mu, b.mu) ||
            !bits(a.a, b.a) || !bits(a.b, b.b) || !bits(a.c, b.c) || !bits(a.d, b.d) ||
            !bits(a.residual, b.residual) || !bits(a.margin, b.margin) ||
            !bits(a.c_norm, b.c_norm))
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("fundamental equations hold on every catalog surface") {
    for (const SurfaceSpec& s : catalog_surfaces()) {
        CAPTURE(s.id);
        const FundamentalReport rep = check_fundamental(s, s.domain_center());
        CHECK(rep.pass);
        REQUIRE(rep.records.size() == 7);
        for (const char* name : kChecks) {
            const ResidualRecord* r = rep.find(name);
            REQUIRE(r != nullptr);
            CHECK(r->pass);
            CHECK(r->value <= r->tolerance);
        }
        CHECK(rep.find("no_such_check") == nullptr);
    }
}

TEST_CASE("stencils must stay inside the domain") {
    const SurfaceSpec s = make_z2z2();
    CHECK_THROWS_AS(check_fundamental(s, Vec3(1.0, 1.0, 1.0)), Error);
    FundamentalOptions wide;
    wide.fd_step = 0.2;
    CHECK_THROWS_AS(check_fundamental(s, Vec3(0.9, 0.0, 0.0), wide), Error);
}

TEST_CASE("each injected fault flips exactly its checks") {
    struct Flip {
        const char* target;
        std::set<std::string> fails;
    };
    const Flip table[] = {
        {"h", {"gauss_nabla", "codazzi_c", "gauss_hat", "s_symmetry", "apolarity", "volume"}},
        {"S", {"gauss_nabla", "codazzi_c", "codazzi_s", "gauss_hat", "s_symmetry"}},
        {"C", {"codazzi_c", "apolarity"}},
        {"Gamma", {"gauss_nabla", "codazzi_s", "gauss_hat"}},
        {"GammaHat", {"codazzi_c", "gauss_hat"}},
        {"xi", {"volume"}},
    };
    const SurfaceSpec s = make_z2z2();
    const Vec3 x(0.2, -0.4, 0.6);

    for (const Flip& f : table) {
        for (uint64_t seed : {1ull, 2ull}) {
            CAPTURE(f.target);
            CAPTURE(seed);
            FundamentalOptions opts;
            opts.fault.target = f.target;
            opts.fault.seed = seed;
            const FundamentalReport rep = check_fundamental(s, x, opts);
            CHECK(!rep.pass);
            for (const char* name : kChecks) {
                const ResidualRecord* r = rep.find(name);
                REQUIRE(r != nullptr);
                CAPTURE(name);
                CHECK(r->pass == (f.fails.count(name) == 0));
            }
        }
    }

    FundamentalOptions bad;
    bad.fault.target = "nonsense";
    CHECK_THROWS_AS(check_fundamental(s, x, bad), Error);
}

TEST_CASE("adapted frame carries the flat-connection pattern of the quadric") {
    const SurfaceSpec s = make_z2z2();
    const Vec3 x(0.1, -0.2, 0.3);
    const AdaptedFrame af = adapted_frame(s, x);

    CHECK(af.report.group == Group::Z2xZ2);
    CHECK(std::abs(af.sigma) == 1.0);

    // Metric antisymmetry in the last two slots.
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                CHECK(std::abs(af.phi_hat[a][b][c] + af.phi_hat[a][c][b]) <= 1e-7);

    // One rotation coefficient of size lambda on each transverse axis, with
    // opposite signs, and none along the first.
    const double lambda = std::pow(2.0, -1.4);
    const double beta = af.phi_hat[2][1][0];
    const double gamma = af.phi_hat[1][0][2];
    CHECK(std::abs(beta) == doctest::Approx(lambda).epsilon(1e-6));
    CHECK(gamma == doctest::Approx(-beta).epsilon(1e-8));
    CHECK(std::abs(af.phi_hat[0][2][1]) <= 1e-6);

    CHECK(af.report.lambda == doctest::Approx(lambda).epsilon(1e-8));
    CHECK(af.report.a == doctest::Approx(-std::pow(2.0, -0.8)).epsilon(1e-8));

    // The gauge is deterministic, and a reference keeps nearby frames close.
    const AdaptedFrame again = adapted_frame(s, x);
    CHECK((again.frame - af.frame).norm() == 0.0);
    const AdaptedFrame stepped = adapted_frame(s, x + Vec3(1e-3, 0, 0), &af);
    CHECK((stepped.frame - af.frame).norm() <= 0.05);
}

TEST_CASE("adapted frame of the rotational families is axis-geodesic") {
    struct Pattern {
        const char* id;
        CubicClass cls;
    };
    for (const Pattern& p : {Pattern{"proper_warped:unit_sphere2", CubicClass::ROT_SO2},
                             Pattern{"proper_warped:hyperbolic_xyz", CubicClass::Z3_GENERIC}}) {
        CAPTURE(p.id);
        const SurfaceSpec s = surface_by_name(p.id);
        const AdaptedFrame af = adapted_frame(s, s.domain_center());
        CHECK(af.report.cls == p.cls);

        // e1 is parallel along itself and the plane directions do not twist
        // into e1 along the axis.
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) CHECK(std::abs(af.phi_hat[0][b][c]) <= 1e-5);
        CHECK(std::abs(af.phi_hat[1][0][2]) <= 1e-5);
        CHECK(std::abs(af.phi_hat[2][0][1]) <= 1e-5);

        // Both plane directions bend toward the axis at the same rate.
        CHECK(af.phi_hat[1][1][0] == doctest::Approx(af.phi_hat[2][2][0]).epsilon(1e-5).scale(1));
    }
}

TEST_CASE("structure report labels the warped families") {
    struct Expect {
        const char* id;
        WarpedCase label;
    };
    const Expect cases[] = {
        {"proper_warped:unit_sphere2", WarpedCase::NU_NONZERO},
        {"proper_warped:hyperbolic_xyz", WarpedCase::NU_NONZERO},
        {"improper_warped:elliptic_paraboloid", WarpedCase::NU_ZERO_LAMBDA_NEQ_ETA},
        {"improper_warped_translation:elliptic_paraboloid", WarpedCase::NU_ZERO_LAMBDA_EQ_ETA},
    };
    const std::set<std::string> names = {"axis_alignment", "transverse_constancy",
                                         "ode_b",          "ode_eta",
                                         "ode_lambda",     "ode_mu",
                                         "curvature_constancy"};
    for (const Expect& e : cases) {
        CAPTURE(e.id);
        const StructureReport rep = check_structure(surface_by_name(e.id));
        CHECK(rep.case_label == e.label);
        CHECK(rep.pass);
        CHECK(rep.dichotomy_ok);
        std::set<std::string> seen;
        for (const ResidualRecord& r : rep.records) {
            seen.insert(r.name);
            CAPTURE(r.name);
            CHECK(r.pass);
        }
        CHECK(seen == names);
        CHECK(rep.t.size() == 21);
        CHECK(rep.curvature.size() == 21);
    }

    // The translation family keeps b at zero and eta locked to lambda.
    const StructureReport tr =
        check_structure(surface_by_name("improper_warped_translation:elliptic_paraboloid"));
    for (size_t i = 0; i < tr.t.size(); ++i) {
        CHECK(std::abs(tr.b[i]) <= 1e-7);
        CHECK(std::abs(tr.eta[i] - tr.lambda[i]) <= 1e-7);
        CHECK(std::abs(tr.nu[i]) <= 1e-7);
    }

    // The scaling family separates them.
    const StructureReport sc =
        check_structure(surface_by_name("improper_warped:elliptic_paraboloid"));
    for (size_t i = 0; i < sc.t.size(); ++i) {
        CHECK(std::abs(sc.nu[i]) <= 1e-6);
        CHECK(std::abs(sc.lambda[i] - sc.eta[i]) > 1e-3);
    }

    // Positive fibre curvature for the sphere fibre, flat for the cubic one.
    const StructureReport sp = check_structure(surface_by_name("proper_warped:unit_sphere2"));
    CHECK(sp.curvature[0] > 0.5);
    const StructureReport hy = check_structure(surface_by_name("proper_warped:hyperbolic_xyz"));
    for (size_t i = 0; i < hy.t.size(); ++i) {
        CHECK(hy.nu[i] < -0.05);
        CHECK(std::abs(hy.curvature[i]) <= 1e-4);
    }
}

TEST_CASE("structure report rejects non-rotational surfaces") {
    const StructureReport rep = check_structure(make_z2z2());
    CHECK(rep.case_label == WarpedCase::NOT_WARPED);
    CHECK(!rep.pass);
    REQUIRE(rep.records.size() == 1);
    CHECK(rep.records[0].name == "rotational_class");
    CHECK(!rep.records[0].pass);

    CHECK_THROWS_AS(check_structure(make_z2z2(), 3), Error);
}

TEST_CASE("parallel scan equals the serial reference") {
    const SurfaceSpec s = make_z2z2();
    const std::array<int, 3> grid{3, 3, 3};
    const ScanResult serial = scan_serial(s, grid);
    const ScanResult parallel = scan(s, grid);
    CHECK(same_points(serial, parallel));
    CHECK(serial.points.size() == 27);

    const SurfaceSpec w = surface_by_name("proper_warped:unit_sphere2");
    CHECK(same_points(scan_serial(w, {2, 3, 3}), scan(w, {2, 3, 3})));

    setenv("AFFSYM_THREADS", "2", 1);
    const ScanResult capped = scan(s, grid);
    unsetenv("AFFSYM_THREADS");
    CHECK(same_points(serial, capped));
}

TEST_CASE("scan grid covers the domain inclusively") {
    const SurfaceSpec s = make_z2z2();
    const ScanResult one = scan_serial(s, {1, 1, 1});
    REQUIRE(one.points.size() == 1);
    CHECK((one.points[0].x - s.domain_center()).norm() < 1e-15);

    const ScanResult r = scan_serial(s, {3, 2, 1});
    REQUIRE(r.points.size() == 6);
    CHECK(r.points.front().x[0] == -1.0);
    CHECK(r.points.back().x[0] == 1.0);
    CHECK(r.points.front().x[1] == -1.0);
    CHECK(r.points.back().x[1] == 1.0);
    CHECK(r.points.front().x[2] == 0.0);
    // Row-major over (t, u, v): the last axis varies fastest.
    CHECK(r.points[1].x[1] == 1.0);
    CHECK(r.points[1].x[0] == -1.0);
}

TEST_CASE("scan records per-point failures without aborting") {
    // Indefinite graph: the transversal split has signature (2,1) everywhere.
    const SurfaceSpec bad = surface_from_position(
        "saddle",
        [](const Vec3& x) {
            return Vec4(x[0], x[1], x[2], 0.5 * (x[0] * x[0] - x[1] * x[1] + x[2] * x[2]));
        },
        {{{-1, 1}, {-1, 1}, {-1, 1}}});
    const ScanResult r = scan_serial(bad, {2, 2, 2});
    REQUIRE(r.points.size() == 8);
    for (const ScanPoint& p : r.points) {
        CHECK(!p.valid);
        CHECK(!p.error.empty());
    }
}

TEST_CASE("scan classifies the quadric everywhere") {
    const ScanResult r = scan(make_z2z2(), {3, 3, 3});
    for (const ScanPoint& p : r.points) {
        REQUIRE(p.valid);
        CHECK(p.group == Group::Z2xZ2);
        CHECK(p.cls == CubicClass::TETRA_A4);
        CHECK(p.lambda == doctest::Approx(std::pow(2.0, -1.4)).epsilon(1e-8));
        CHECK(!p.ambiguous);
        CHECK(p.residual <= 1e-8);
        CHECK(p.margin > 0.1);
        CHECK(p.apolarity <= 1e-8);
        CHECK(p.volume_residual <= 1e-8);
        CHECK(p.s_asym <= 1e-8);
    }
}
