#include "doctest.h"

#include "affsym/canonical.hpp"

#include <cmath>

using namespace affsym;

namespace {

Mat3 diag(double a, double b, double c) { return Vec3(a, b, c).asDiagonal(); }

Mat3 z2_shape(double a, double b, double c, double d) {
    Mat3 S = diag(a, b, c);
    S(1, 2) = S(2, 1) = d;
    return S;
}

}  // namespace

TEST_CASE("enum names round-trip") {
    for (Group g : {Group::SO3, Group::Z2xSO2, Group::SO2, Group::A4, Group::S3,
                    Group::Z2xZ2, Group::Z3, Group::Z2, Group::TRIVIAL})
        CHECK(group_from_string(to_string(g)) == g);
    for (CubicClass c : {CubicClass::ZERO, CubicClass::ROT_SO2, CubicClass::TETRA_A4,
                         CubicClass::TRI_S3, CubicClass::Z3_GENERIC, CubicClass::Z2_GENERIC,
                         CubicClass::NO_SYMMETRY})
        CHECK(cubic_class_from_string(to_string(c)) == c);
    CHECK_THROWS_AS(group_from_string("bogus"), Error);
    CHECK_THROWS_AS(cubic_class_from_string("bogus"), Error);
}

TEST_CASE("classification recovers each family from a rotated copy") {
    RotationSampler rng(17);
    struct Case {
        CubicTensor C;
        CubicClass cls;
        double lambda, mu;
    };
    const Case cases[] = {
        {cubic_so2(0.9), CubicClass::ROT_SO2, 0.9, 0.0},
        {cubic_a4(0.7), CubicClass::TETRA_A4, 0.7, 0.0},
        {cubic_s3(1.1), CubicClass::TRI_S3, 1.1, 0.0},
        {cubic_z3(0.8, 0.5), CubicClass::Z3_GENERIC, 0.8, 0.5},
        {cubic_z2(0.9, 0.4), CubicClass::Z2_GENERIC, 0.9, 0.4},
    };
    for (const Case& c : cases) {
        CAPTURE(to_string(c.cls));
        for (int trial = 0; trial < 5; ++trial) {
            const Mat3 R = rng.next();
            const CanonicalForm cf = classify_cubic(rotate_cubic(c.C, R));
            CHECK(cf.cls == c.cls);
            CHECK(cf.lambda == doctest::Approx(c.lambda).epsilon(1e-9));
            CHECK(cf.mu == doctest::Approx(c.mu).epsilon(1e-9).scale(1));
            CHECK(cf.residual <= 1e-9);

            // The returned rotation really sends the input to the template.
            const CubicTensor back = rotate_cubic(rotate_cubic(c.C, R), cf.rotation);
            CubicTensor tmpl;
            switch (c.cls) {
                case CubicClass::ROT_SO2: tmpl = cubic_so2(cf.lambda); break;
                case CubicClass::TETRA_A4: tmpl = cubic_a4(cf.lambda); break;
                case CubicClass::TRI_S3: tmpl = cubic_s3(cf.lambda); break;
                case CubicClass::Z3_GENERIC: tmpl = cubic_z3(cf.lambda, cf.mu); break;
                default: tmpl = cubic_z2(cf.lambda, cf.mu); break;
            }
            CHECK((back - tmpl).norm() <= 1e-8);
        }
    }

    CHECK(classify_cubic(cubic_zero()).cls == CubicClass::ZERO);

    // A sum of two unrelated families has no symmetry at all.
    const CubicTensor mixed =
        cubic_z2(0.5, 0.3) + rotate_cubic(cubic_s3(0.2), rng.next());
    CHECK(classify_cubic(mixed).cls == CubicClass::NO_SYMMETRY);
}

TEST_CASE("degenerate parameters collapse to the more symmetric class") {
    // mu = 0 is the rotational form, lambda = 0 the tetrahedral one.
    CHECK(classify_cubic(cubic_z3(0.9, 0.0)).cls == CubicClass::ROT_SO2);
    CHECK(classify_cubic(cubic_z2(0.0, 0.7)).cls == CubicClass::TETRA_A4);

    // lambda = mu is a rotated triangular form with doubled parameter.
    const CanonicalForm s3 = classify_cubic(cubic_z2(0.8, 0.8));
    CHECK(s3.cls == CubicClass::TRI_S3);
    CHECK(s3.lambda == doctest::Approx(1.6).epsilon(1e-9));

    // mu = sqrt(2) lambda is a rotated tetrahedral form, lambda' = sqrt(3) lambda.
    const CanonicalForm a4 = classify_cubic(cubic_z3(0.9, std::sqrt(2.0) * 0.9));
    CHECK(a4.cls == CubicClass::TETRA_A4);
    CHECK(a4.lambda == doctest::Approx(std::sqrt(3.0) * 0.9).epsilon(1e-9));
}

TEST_CASE("the triangular and equal-parameter forms differ by a quarter turn") {
    const Mat3 R = axis_rotation(Vec3::UnitX(), M_PI / 4.0);
    const CubicTensor turned = rotate_cubic(cubic_s3(1.0), R);
    CHECK((turned - cubic_z2(0.5, 0.5)).norm() < 1e-14);
}

TEST_CASE("joint stabilizer of every stratum") {
    struct Stratum {
        const char* name;
        CubicTensor C;
        Mat3 S;
        Group group;
    };
    const Stratum strata[] = {
        {"so3", cubic_zero(), diag(1.3, 1.3, 1.3), Group::SO3},
        {"z2xso2", cubic_zero(), diag(0.9, 0.2, 0.2), Group::Z2xSO2},
        {"so2", cubic_so2(0.8), diag(0.5, -0.3, -0.3), Group::SO2},
        {"a4", cubic_a4(0.6), diag(0.4, 0.4, 0.4), Group::A4},
        {"s3", cubic_s3(0.7), diag(0.3, 0.3, -0.2), Group::S3},
        {"z2xz2", cubic_a4(0.6), diag(0.7, 0.1, -0.4), Group::Z2xZ2},
        {"z3", cubic_z3(0.9, 0.5), diag(0.6, -0.2, -0.2), Group::Z3},
        {"z2", cubic_z2(0.9, 0.4), z2_shape(0.3, -0.1, 0.5, 0.25), Group::Z2},
    };

    RotationSampler rng(23);
    for (const Stratum& st : strata) {
        CAPTURE(st.name);
        const SymmetryReport ref = stabilizer_pair(st.C, st.S);
        CHECK(ref.group == st.group);
        CHECK(ref.residual <= 1e-9);
        CHECK(!ref.ambiguous);
        if (st.group == Group::SO3)
            CHECK(std::isinf(ref.margin));
        else
            CHECK(ref.margin > 1e-3);

        for (int trial = 0; trial < 4; ++trial) {
            const Mat3 R = rng.next();
            const SymmetryReport rep =
                stabilizer_pair(rotate_cubic(st.C, R), R.transpose() * st.S * R);
            CHECK(rep.group == st.group);
            CHECK(rep.lambda == doctest::Approx(ref.lambda).epsilon(1e-9).scale(1));
            CHECK(rep.mu == doctest::Approx(ref.mu).epsilon(1e-9).scale(1));
            CHECK(rep.a == doctest::Approx(ref.a).epsilon(1e-9).scale(1));
            CHECK(rep.b == doctest::Approx(ref.b).epsilon(1e-9).scale(1));
            CHECK(rep.c == doctest::Approx(ref.c).epsilon(1e-9).scale(1));
            CHECK(rep.d == doctest::Approx(ref.d).epsilon(1e-9).scale(1));
        }
    }
}

TEST_CASE("canonical shape entries keep their stratum pattern") {
    // Zero-cubic strata put the distinguished eigenvalue first; the
    // four-group stratum leads with the dominant one.
    const SymmetryReport r1 = stabilizer_pair(cubic_zero(), diag(0.2, 0.9, 0.2));
    CHECK(r1.group == Group::Z2xSO2);
    CHECK(r1.a == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(r1.b == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r1.c == doctest::Approx(0.2).epsilon(1e-12));

    const SymmetryReport r2 = stabilizer_pair(cubic_a4(0.6), diag(0.1, -0.8, 0.3));
    CHECK(r2.group == Group::Z2xZ2);
    CHECK(std::abs(r2.a) >= std::abs(r2.b));
    CHECK(std::abs(r2.a) >= std::abs(r2.c));
    // Only cyclic shifts are allowed, so (0.1, -0.8, 0.3) leads with -0.8.
    CHECK(r2.a == doctest::Approx(-0.8).epsilon(1e-12));
    CHECK(r2.b == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r2.c == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(std::abs(r2.d) <= 1e-12);
}

TEST_CASE("boundary pairs upgrade or keep the group as the shape operator decides") {
    RotationSampler rng(29);
    const Mat3 R = rng.next();
    auto turned = [&](const CubicTensor& C, const Mat3& S) {
        return stabilizer_pair(rotate_cubic(C, R), R.transpose() * S * R);
    };

    // Tetrahedral cubic boundary: isotropic S lifts Z3 to A4, split S keeps Z3.
    const CubicTensor z3b = cubic_z3(0.8, std::sqrt(2.0) * 0.8);
    CHECK(turned(z3b, diag(0.4, 0.4, 0.4)).group == Group::A4);
    CHECK(turned(z3b, diag(0.9, 0.2, 0.2)).group == Group::Z3);

    // Triangular cubic boundary: S must be isotropic on the symmetry plane.
    const CubicTensor z2b = cubic_z2(0.6, 0.6);
    CHECK(turned(z2b, diag(0.5, 0.5, 0.5)).group == Group::S3);
    CHECK(turned(z2b, z2_shape(0.2, 0.55, 0.55, 0.35)).group == Group::S3);
    CHECK(turned(z2b, diag(0.4, 0.1, -0.3)).group == Group::Z2);

    // Zero cubic: the eigenvalue pattern of S decides everything.
    CHECK(turned(cubic_zero(), diag(0.7, 0.7, 0.7)).group == Group::SO3);
    CHECK(turned(cubic_zero(), diag(0.7, -0.1, -0.1)).group == Group::Z2xSO2);
    CHECK(turned(cubic_zero(), diag(0.7, 0.2, -0.4)).group == Group::Z2xZ2);
}

TEST_CASE("group generators and samples satisfy their invariances") {
    struct Pair {
        Group g;
        CubicTensor C;
        Mat3 S;
        int order;  // 0 = continuous
    };
    const Pair pairs[] = {
        {Group::SO3, cubic_zero(), diag(1.1, 1.1, 1.1), 0},
        {Group::Z2xSO2, cubic_zero(), diag(0.9, 0.2, 0.2), 0},
        {Group::SO2, cubic_so2(0.8), diag(0.5, -0.3, -0.3), 0},
        {Group::A4, cubic_a4(0.6), diag(0.4, 0.4, 0.4), 12},
        {Group::S3, cubic_s3(0.7), diag(0.3, 0.3, -0.2), 6},
        {Group::Z2xZ2, cubic_a4(0.6), diag(0.7, 0.1, -0.4), 4},
        {Group::Z3, cubic_z3(0.9, 0.5), diag(0.6, -0.2, -0.2), 3},
        {Group::Z2, cubic_z2(0.9, 0.4), z2_shape(0.3, -0.1, 0.5, 0.25), 2},
        {Group::TRIVIAL, cubic_z2(0.9, 0.4), z2_shape(0.3, -0.1, 0.5, 0.25), 1},
    };
    for (const Pair& p : pairs) {
        CAPTURE(to_string(p.g));
        for (const Mat3& g : group_generators(p.g)) {
            CHECK(is_special_orthogonal(g, 1e-12));
            CHECK(symmetry_residual(p.C, p.S, g) <= 1e-12);
        }
        const auto sample = group_sample(p.g, 24, 5);
        if (p.order > 0)
            CHECK(static_cast<int>(sample.size()) == p.order);
        else
            CHECK(sample.size() >= 24);
        for (const Mat3& g : sample) CHECK(symmetry_residual(p.C, p.S, g) <= 1e-12);

        const auto again = group_sample(p.g, 24, 5);
        REQUIRE(again.size() == sample.size());
        for (size_t i = 0; i < sample.size(); ++i)
            CHECK((again[i] - sample[i]).norm() == 0.0);
    }
}

TEST_CASE("conjugation validates its inputs") {
    RotationSampler rng(31);
    const Mat3 R = rng.next();
    const Mat3 g = rot_P(1);
    const Mat3 c = conjugate_to_frame(g, R);
    CHECK(is_special_orthogonal(c, 1e-12));
    CHECK((c - R * g * R.transpose()).norm() < 1e-13);
    CHECK_THROWS_AS(conjugate_to_frame(2.0 * Mat3::Identity(), R), Error);
}
