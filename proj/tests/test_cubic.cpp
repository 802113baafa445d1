#include "doctest.h"

#include "affsym/cubic.hpp"
#include "affsym/jet.hpp"

#include <cmath>

using namespace affsym;

TEST_CASE("component storage is totally symmetric") {
    CubicTensor C;
    C.at(0, 1, 2) = 5.0;
    CHECK(C(1, 2, 0) == 5.0);
    CHECK(C(2, 0, 1) == 5.0);
    CHECK(C(2, 1, 0) == 5.0);

    int hits[10] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) hits[CubicTensor::index(i, j, k)]++;
    for (int n = 0; n < 10; ++n) CHECK(hits[n] > 0);
}

TEST_CASE("norms and traces of the canonical families") {
    const double l = 0.8, m = 0.5;
    CHECK(cubic_so2(l).norm() == doctest::Approx(std::sqrt(10.0) * l).epsilon(1e-14));
    CHECK(cubic_a4(l).norm() == doctest::Approx(std::sqrt(6.0) * l).epsilon(1e-14));
    CHECK(cubic_s3(l).norm() == doctest::Approx(2.0 * l).epsilon(1e-14));
    CHECK(cubic_z3(l, m).norm() ==
          doctest::Approx(std::sqrt(10.0 * l * l + 4.0 * m * m)).epsilon(1e-14));
    CHECK(cubic_z2(l, m).norm() ==
          doctest::Approx(std::sqrt(10.0 * l * l + 6.0 * m * m)).epsilon(1e-14));
    CHECK(cubic_zero().norm() == 0.0);

    for (const CubicTensor& C :
         {cubic_so2(l), cubic_a4(l), cubic_s3(l), cubic_z3(l, m), cubic_z2(l, m)})
        CHECK(C.trace_vector().norm() < 1e-15);
}

TEST_CASE("evaluation, polarization and gradient") {
    CHECK(cubic_eval(cubic_so2(1.0), Vec3(1, 0, 0)) == doctest::Approx(2.0));
    CHECK(cubic_eval(cubic_a4(1.0), Vec3(1, 1, 1)) == doctest::Approx(6.0));
    const Vec3 diag = Vec3(1, 1, 1).normalized();
    CHECK(cubic_eval(cubic_a4(1.0), diag) == doctest::Approx(2.0 / std::sqrt(3.0)));

    const CubicTensor C = cubic_z2(0.7, 0.4);
    const Vec3 v(0.3, -1.1, 0.5);
    CHECK(cubic_apply(C, v, v, v) == doctest::Approx(cubic_eval(C, v)).epsilon(1e-13));

    const Vec3 w(0.2, 0.9, -0.4);
    const double dfd =
        richardson_central([&](double t) { return cubic_eval(C, v + t * w); }, 0.0, 1e-4);
    CHECK(cubic_grad(C, v).dot(w) == doctest::Approx(dfd).epsilon(1e-9));
}

TEST_CASE("contraction operator tables") {
    const Mat3 t_so2 = t_operator(cubic_so2(1.0));
    CHECK((t_so2 - Mat3(Vec3(6, 2, 2).asDiagonal())).norm() < 1e-14);

    CHECK((t_operator(cubic_a4(1.0)) - 2.0 * Mat3::Identity()).norm() < 1e-14);
    CHECK((t_operator(cubic_s3(1.0)) - Mat3(Vec3(2, 2, 0).asDiagonal())).norm() < 1e-14);
    CHECK((t_operator(cubic_z3(1.0, 1.0)) - Mat3(Vec3(6, 4, 4).asDiagonal())).norm() < 1e-14);

    Mat3 t_z2;
    t_z2 << 14, 0, 0, 0, 10, -8, 0, -8, 10;
    CHECK((t_operator(cubic_z2(1.0, 2.0)) - t_z2).norm() < 1e-13);
}

TEST_CASE("rotation action is a pullback") {
    RotationSampler rng(3);
    const Mat3 R = rng.next();
    const CubicTensor C = cubic_z2(0.7, 0.4);
    const CubicTensor Cr = rotate_cubic(C, R);

    for (const Vec3& v : {Vec3(1, 0, 0), Vec3(0.4, -0.8, 0.2), Vec3(-1.1, 0.3, 0.9)})
        CHECK(cubic_eval(Cr, v) == doctest::Approx(cubic_eval(C, R * v)).epsilon(1e-12));

    CHECK(Cr.norm() == doctest::Approx(C.norm()).epsilon(1e-12));
    CHECK((t_operator(Cr) - R.transpose() * t_operator(C) * R).norm() < 1e-12);

    const Mat3 R2 = rng.next();
    const CubicTensor both = rotate_cubic(C, R * R2);
    const CubicTensor stepwise = rotate_cubic(rotate_cubic(C, R), R2);
    CHECK((both - stepwise).norm() < 1e-12);
    CHECK((rotate_cubic(C, Mat3::Identity()) - C).norm() == 0.0);
}

TEST_CASE("sphere maximization finds the symmetry directions") {
    const SphereMax m1 = sphere_maximize(cubic_so2(1.3));
    CHECK(m1.value == doctest::Approx(2.6).epsilon(1e-10));
    CHECK(std::abs(m1.direction.dot(Vec3(1, 0, 0))) == doctest::Approx(1.0).epsilon(1e-9));

    const SphereMax m2 = sphere_maximize(cubic_a4(1.0));
    CHECK(m2.value == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-10));
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(m2.direction[i]) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-8));

    // The tetrahedral form peaks on four body diagonals at equal height.
    const auto maxima = sphere_local_maxima(cubic_a4(1.0));
    CHECK(maxima.size() >= 4);
    for (int n = 0; n < 4; ++n)
        CHECK(maxima[n].value == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-8));
    for (int n = 1; n < 4; ++n)
        CHECK(std::abs(maxima[n].direction.dot(maxima[0].direction)) < 0.9);

    RotationSampler rng(11);
    const Mat3 R = rng.next();
    const SphereMax m3 = sphere_maximize(rotate_cubic(cubic_a4(1.0), R));
    CHECK(m3.value == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-9));
}
