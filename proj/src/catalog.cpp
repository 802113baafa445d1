#include "affsym/catalog.hpp"

#include <cmath>
#include <utility>

namespace affsym {
namespace {

double dcos(double x, int d) {
    switch (d & 3) {
        case 0: return std::cos(x);
        case 1: return -std::sin(x);
        case 2: return -std::cos(x);
        default: return std::sin(x);
    }
}

double dsin(double x, int d) {
    switch (d & 3) {
        case 0: return std::sin(x);
        case 1: return std::cos(x);
        case 2: return -std::sin(x);
        default: return -std::cos(x);
    }
}

// Sign of the strong-convexity condition for a warped family at parameter t.
double warp_condition(SurfaceFamily family, SphereSpec::Kind kind, const CurveSpec& g, double t) {
    const double g1 = g.gamma1(t, 0);
    const double d1 = g.gamma1(t, 1);
    const double d2 = g.gamma2(t, 1);
    const double w = g.gamma2(t, 2) * d1 - g.gamma1(t, 2) * d2;
    switch (family) {
        case SurfaceFamily::ProperWarped:
            return (kind == SphereSpec::Kind::ProperElliptic ? -1.0 : 1.0) * g1 * d1 * w;
        case SurfaceFamily::ImproperScaling:
            return g1 * d1 * w;
        case SurfaceFamily::ImproperTranslation:
            return d1 * w;
        default:
            return 1.0;
    }
}

void validate_curve(SurfaceFamily family, const SphereSpec& fibre, const CurveSpec& g) {
    if (!(g.domain[1] > g.domain[0])) throw Error("curve domain is empty");
    const int n = 256;
    for (int i = 0; i <= n; ++i) {
        const double t = g.domain[0] + (g.domain[1] - g.domain[0]) * i / n;
        if (!(warp_condition(family, fibre.kind, g, t) > 0.0))
            throw Error("curve violates the convexity condition of this warped family");
        if (family == SurfaceFamily::ProperWarped && std::abs(g.gamma2(t, 0)) < 1e-12)
            throw Error("warp factor vanishes on the curve domain");
        if (family == SurfaceFamily::ImproperScaling && std::abs(g.gamma1(t, 0)) < 1e-12)
            throw Error("scaling factor vanishes on the curve domain");
    }
}

}  // namespace

SurfaceSpec make_z2z2() {
    SurfaceSpec s;
    s.id = "z2z2";
    s.family = SurfaceFamily::Z2Z2;
    s.domain = {{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};
    s.expected_group = "Z2xZ2";
    s.partial = [](const Vec3& x, int a, int b, int c) -> Vec4 {
        const double t = x[0], u = x[1], v = x[2];
        Vec4 r = Vec4::Zero();
        if (b == 0 && c == 0) {
            r[0] += std::exp(t);
            r[1] += (a % 2 ? -1.0 : 1.0) * std::exp(-t);
        }
        if (a == 0 && b == 0) {
            if (c == 0) {
                r[0] += 2.0 * v * v;
                r[2] = 2.0 * v;
            } else if (c == 1) {
                r[0] += 4.0 * v;
                r[2] = 2.0;
            } else if (c == 2) {
                r[0] += 4.0;
            }
        }
        if (a == 0 && c == 0) {
            if (b == 0) {
                r[1] += 2.0 * u * u;
                r[3] = 2.0 * u;
            } else if (b == 1) {
                r[1] += 4.0 * u;
                r[3] = 2.0;
            } else if (b == 2) {
                r[1] += 4.0;
            }
        }
        return r;
    };
    return s;
}

SurfaceSpec make_unit_sphere3() {
    SurfaceSpec s;
    s.id = "unit_sphere3";
    s.family = SurfaceFamily::Plain;
    // Angular chart; stays far from the u,v = pi/2 degeneracies.
    s.domain = {{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};
    s.expected_group = "SO3";
    s.partial = [](const Vec3& x, int a, int b, int c) -> Vec4 {
        const double t = x[0], u = x[1], v = x[2];
        Vec4 r;
        r[0] = dcos(v, c) * dcos(u, b) * dcos(t, a);
        r[1] = dcos(v, c) * dcos(u, b) * dsin(t, a);
        r[2] = a == 0 ? dcos(v, c) * dsin(u, b) : 0.0;
        r[3] = (a == 0 && b == 0) ? dsin(v, c) : 0.0;
        return r;
    };
    return s;
}

SurfaceSpec make_paraboloid_graph3() {
    SurfaceSpec s;
    s.id = "paraboloid_graph3";
    s.family = SurfaceFamily::Plain;
    s.domain = {{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};
    s.expected_group = "SO3";
    s.partial = [](const Vec3& x, int a, int b, int c) -> Vec4 {
        Vec4 r = Vec4::Zero();
        const int total = a + b + c;
        if (total == 0) {
            r.head<3>() = x;
            r[3] = 0.5 * x.squaredNorm();
        } else if (total == 1) {
            const int i = a ? 0 : (b ? 1 : 2);
            r[i] = 1.0;
            r[3] = x[i];
        } else if (total == 2 && (a == 2 || b == 2 || c == 2)) {
            r[3] = 1.0;
        }
        return r;
    };
    return s;
}

SphereSpec make_unit_sphere2() {
    SphereSpec f;
    f.kind = SphereSpec::Kind::ProperElliptic;
    f.id = "unit_sphere2";
    f.domain = {{{-0.5, 0.5}, {-0.5, 0.5}}};
    f.partial = [](double u, double v, int du, int dv) -> Vec3 {
        Vec3 r;
        r[0] = dcos(u, du) * dcos(v, dv);
        r[1] = dcos(u, du) * dsin(v, dv);
        r[2] = dv == 0 ? dsin(u, du) : 0.0;
        return r;
    };
    f.mean_curvature = 1.0;
    return f;
}

SphereSpec make_elliptic_paraboloid() {
    SphereSpec f;
    f.kind = SphereSpec::Kind::ImproperGraph;
    f.id = "elliptic_paraboloid";
    f.domain = {{{-1.0, 1.0}, {-1.0, 1.0}}};
    f.partial = [](double u, double v, int du, int dv) -> Vec3 {
        Vec3 r = Vec3::Zero();
        const int total = du + dv;
        if (total == 0) {
            r = Vec3(u, v, 0.5 * (u * u + v * v));
        } else if (total == 1) {
            const int i = du ? 0 : 1;
            r[i] = 1.0;
            r[2] = du ? u : v;
        } else if (total == 2 && (du == 2 || dv == 2)) {
            r[2] = 1.0;
        }
        return r;
    };
    f.mean_curvature = 0.0;
    return f;
}

SphereSpec make_hyperbolic_xyz() {
    SphereSpec f;
    f.kind = SphereSpec::Kind::ProperHyperbolic;
    f.id = "hyperbolic_xyz";
    f.domain = {{{-0.5, 0.5}, {-0.5, 0.5}}};
    // xy z = c. Scaling phi -> s phi sends the mean curvature H -> s^(-3/2) H
    // and at c = 1 it is -3^(-3/4), so c = 3^(-3/2) makes H exactly -1.
    const double c = std::pow(3.0, -1.5);
    f.partial = [c](double u, double v, int du, int dv) -> Vec3 {
        Vec3 r;
        r[0] = dv == 0 ? std::exp(u) : 0.0;
        r[1] = du == 0 ? std::exp(v) : 0.0;
        r[2] = c * ((du + dv) % 2 ? -1.0 : 1.0) * std::exp(-u - v);
        return r;
    };
    f.mean_curvature = -1.0;
    return f;
}

SurfaceSpec make_proper_warped(const SphereSpec& fibre, const CurveSpec& curve) {
    if (fibre.kind == SphereSpec::Kind::ImproperGraph)
        throw Error("proper warped product needs a proper affine sphere fibre");
    if (std::abs(std::abs(fibre.mean_curvature) - 1.0) > 1e-9)
        throw Error("fibre must be normalized to unit affine mean curvature");
    validate_curve(SurfaceFamily::ProperWarped, fibre, curve);

    SurfaceSpec s;
    s.id = "proper_warped:" + fibre.id;
    s.family = SurfaceFamily::ProperWarped;
    s.curve = std::make_shared<CurveSpec>(curve);
    s.sphere = std::make_shared<SphereSpec>(fibre);
    s.domain[0] = curve.domain;
    s.domain[1] = fibre.domain[0];
    s.domain[2] = fibre.domain[1];
    s.expected_group =
        fibre.kind == SphereSpec::Kind::ProperHyperbolic ? "Z3" : "SO2";
    auto cv = s.curve;
    auto fb = s.sphere;
    s.partial = [cv, fb](const Vec3& x, int a, int b, int c) -> Vec4 {
        Vec4 r;
        r[0] = (b == 0 && c == 0) ? cv->gamma1(x[0], a) : 0.0;
        r.tail<3>() = cv->gamma2(x[0], a) * fb->partial(x[1], x[2], b, c);
        return r;
    };
    return s;
}

SurfaceSpec make_improper_warped(const SphereSpec& fibre, const CurveSpec& curve,
                                 bool translation_only) {
    if (fibre.kind != SphereSpec::Kind::ImproperGraph)
        throw Error("improper warped product needs a graph fibre");
    if (std::abs(fibre.mean_curvature) > 1e-9)
        throw Error("fibre must have zero affine mean curvature");
    const SurfaceFamily family =
        translation_only ? SurfaceFamily::ImproperTranslation : SurfaceFamily::ImproperScaling;
    validate_curve(family, fibre, curve);

    SurfaceSpec s;
    s.id = (translation_only ? "improper_warped_translation:" : "improper_warped:") + fibre.id;
    s.family = family;
    s.curve = std::make_shared<CurveSpec>(curve);
    s.sphere = std::make_shared<SphereSpec>(fibre);
    s.domain[0] = curve.domain;
    s.domain[1] = fibre.domain[0];
    s.domain[2] = fibre.domain[1];
    s.expected_group = "SO2";
    auto cv = s.curve;
    auto fb = s.sphere;
    if (translation_only) {
        // F = (phi, 0) + g2 e3 + g1 e4
        s.partial = [cv, fb](const Vec3& x, int a, int b, int c) -> Vec4 {
            Vec4 r = Vec4::Zero();
            if (a == 0) r.head<3>() = fb->partial(x[1], x[2], b, c);
            if (b == 0 && c == 0) {
                r[2] += cv->gamma2(x[0], a);
                r[3] = cv->gamma1(x[0], a);
            }
            return r;
        };
    } else {
        // F = g1 (phi, 1) + g2 e3
        s.partial = [cv, fb](const Vec3& x, int a, int b, int c) -> Vec4 {
            Vec4 r = Vec4::Zero();
            const double g1 = cv->gamma1(x[0], a);
            r.head<3>() = g1 * fb->partial(x[1], x[2], b, c);
            if (b == 0 && c == 0) {
                r[2] += cv->gamma2(x[0], a);
                r[3] = g1;
            }
            return r;
        };
    }
    return s;
}

CurveSpec default_proper_elliptic_curve() {
    CurveSpec g;
    g.c1[6] = 1.0; // cosh t
    g.c2[0] = 2.0;
    g.c2[7] = 1.0; // sinh t + 2
    g.domain = {0.2, 1.2};
    return g;
}

CurveSpec default_proper_hyperbolic_curve() {
    // The offset in gamma2 matters: (sinh t + 2, cosh t) is a translated
    // affine sphere (S = -I), which enlarges the symmetry group to S3.
    CurveSpec g;
    g.c1[0] = 2.0;
    g.c1[7] = 1.0; // sinh t + 2
    g.c2[0] = 1.0;
    g.c2[6] = 1.0; // cosh t + 1
    g.domain = {0.2, 1.2};
    return g;
}

CurveSpec default_improper_curve() {
    CurveSpec g;
    g.c1[0] = 2.0;
    g.c1[1] = 1.0; // t + 2
    g.c2[2] = 1.0; // t^2
    g.domain = {0.5, 1.5};
    return g;
}

CurveSpec default_improper_translation_curve() {
    // (t + 2, t^2) would make the translation surface the graph of a
    // quadratic polynomial, i.e. a paraboloid with zero cubic form.
    CurveSpec g;
    g.c1[0] = 2.0;
    g.c1[1] = 1.0; // t + 2
    g.c2[3] = 1.0; // t^3
    g.domain = {0.5, 1.5};
    return g;
}

std::vector<SurfaceSpec> catalog_surfaces() {
    std::vector<SurfaceSpec> out;
    out.push_back(make_z2z2());
    out.push_back(make_unit_sphere3());
    out.push_back(make_paraboloid_graph3());
    out.push_back(surface_by_name("proper_warped:unit_sphere2"));
    out.push_back(surface_by_name("proper_warped:hyperbolic_xyz"));
    out.push_back(surface_by_name("improper_warped:elliptic_paraboloid"));
    out.push_back(surface_by_name("improper_warped_translation:elliptic_paraboloid"));
    return out;
}

SurfaceSpec surface_by_name(const std::string& name, std::shared_ptr<const CurveSpec> curve) {
    const auto colon = name.find(':');
    if (colon == std::string::npos) {
        if (name == "z2z2") return make_z2z2();
        if (name == "unit_sphere3") return make_unit_sphere3();
        if (name == "paraboloid_graph3") return make_paraboloid_graph3();
        throw Error("unknown surface: " + name);
    }
    const std::string head = name.substr(0, colon);
    const SphereSpec fibre = sphere_by_name(name.substr(colon + 1));
    if (head == "proper_warped") {
        const CurveSpec g = curve ? *curve
                            : fibre.kind == SphereSpec::Kind::ProperHyperbolic
                                ? default_proper_hyperbolic_curve()
                                : default_proper_elliptic_curve();
        return make_proper_warped(fibre, g);
    }
    if (head == "improper_warped" || head == "improper_warped_translation") {
        const bool translation = head == "improper_warped_translation";
        const CurveSpec g = curve ? *curve
                            : translation ? default_improper_translation_curve()
                                          : default_improper_curve();
        return make_improper_warped(fibre, g, translation);
    }
    throw Error("unknown surface: " + name);
}

SphereSpec sphere_by_name(const std::string& name) {
    if (name == "unit_sphere2") return make_unit_sphere2();
    if (name == "elliptic_paraboloid") return make_elliptic_paraboloid();
    if (name == "hyperbolic_xyz") return make_hyperbolic_xyz();
    throw Error("unknown fibre surface: " + name);
}

}  // namespace affsym
