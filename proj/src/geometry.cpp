#include "affsym/geometry.hpp"

#include <cmath>

namespace affsym {

Mat3 axis_rotation(const Vec3& axis, double angle) {
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

Mat3 rot_P(int axis) {
    Vec3 d = -Vec3::Ones();
    d[axis - 1] = 1.0;
    return d.asDiagonal();
}

Mat3 rot_R(int axis) {
    Vec3 e = Vec3::Zero();
    e[axis - 1] = 1.0;
    const double c = -0.5, s = std::sqrt(3.0) / 2.0;
    // Exact entries; AngleAxis would introduce ~1e-16 noise in the zeros.
    Mat3 R;
    if (axis == 1)
        R << 1, 0, 0, 0, c, -s, 0, s, c;
    else if (axis == 2)
        R << c, 0, s, 0, 1, 0, -s, 0, c;
    else
        R << c, -s, 0, s, c, 0, 0, 0, 1;
    return R;
}

Mat3 rot_Q() {
    Mat3 Q = Mat3::Zero();
    Q(1, 0) = Q(2, 1) = Q(0, 2) = 1.0;  // e1->e2->e3->e1
    return Q;
}

bool is_special_orthogonal(const Mat3& R, double tol) {
    return (R.transpose() * R - Mat3::Identity()).norm() <= tol &&
           std::abs(R.determinant() - 1.0) <= tol;
}

Mat3 so3_exp(const Vec3& w) {
    const double th = w.norm();
    if (th < 1e-12) {
        Mat3 W;
        W << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
        return Mat3::Identity() + W + 0.5 * W * W;
    }
    return Eigen::AngleAxisd(th, w / th).toRotationMatrix();
}

// xoshiro256** — small, seedable, identical output everywhere.
static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RotationSampler::RotationSampler(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& si : s_) si = splitmix64(x);
}

std::uint64_t RotationSampler::next_u64() {
    auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RotationSampler::uniform() { return std::ldexp(static_cast<double>(next_u64() >> 11), -53); }

Mat3 RotationSampler::next() {
    // Shoemake's subgroup algorithm: uniform unit quaternion.
    const double u1 = uniform(), u2 = uniform(), u3 = uniform();
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    const double t1 = 2.0 * M_PI * u2, t2 = 2.0 * M_PI * u3;
    Eigen::Quaterniond q(a * std::sin(t1), a * std::cos(t1), b * std::sin(t2), b * std::cos(t2));
    return q.normalized().toRotationMatrix();
}

}  // namespace affsym
