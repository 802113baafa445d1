#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace affsym {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Rotation about a unit axis by angle, as a matrix whose columns are the
// images of the basis vectors.
Mat3 axis_rotation(const Vec3& axis, double angle);

// Order-2 rotations about the coordinate axes: P1 = diag(1,-1,-1) etc.
Mat3 rot_P(int axis);
// Order-3 rotation by 2*pi/3 about coordinate axis (1-based).
Mat3 rot_R(int axis);
// Order-3 rotation by 2*pi/3 about (1,1,1)/sqrt(3); exactly the cyclic
// permutation e1 -> e2 -> e3 -> e1.
Mat3 rot_Q();

bool is_special_orthogonal(const Mat3& R, double tol);

// so(3) exponential; w is the rotation vector (axis * angle).
Mat3 so3_exp(const Vec3& w);

// Deterministic uniform SO(3) sampler fed by a 64-bit generator state.
// Uses only ldexp and libm trig so runs reproduce bit-for-bit on one platform.
struct RotationSampler {
    explicit RotationSampler(std::uint64_t seed);
    Mat3 next();
    double uniform();  // in [0, 1)

  private:
    std::uint64_t s_[4];
    std::uint64_t next_u64();
};

}  // namespace affsym
