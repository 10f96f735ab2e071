// SO(3)/SE(3) primitives, pinhole projection and trajectory alignment.

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <span>
#include <stdexcept>
#include <vector>

namespace rigidtrack {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Pinhole camera model. Focal lengths and principal point in pixels.
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  Intrinsics() = default;
  Intrinsics(double fx_, double fy_, double cx_, double cy_);

  Mat3 matrix() const;
  Mat3 inverse_matrix() const;
};

/// Rigid transform: y = R * x + t. Rotation stored as an orthonormal matrix.
struct SE3 {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  SE3() = default;
  SE3(const Mat3& rotation, const Vec3& translation) : R(rotation), t(translation) {}

  static SE3 identity() { return SE3(); }
  static SE3 from_matrix(const Mat4& m);

  SE3 inverse() const;
  SE3 operator*(const SE3& rhs) const;
  Vec3 operator*(const Vec3& x) const { return R * x + t; }
  Mat4 matrix() const;
};

/// Orthonormality and det(R)=+1, elementwise tolerance.
bool is_rotation(const Mat3& R, double tol = 1e-9);

Mat3 skew(const Vec3& v);

Mat3 so3_exp(const Vec3& omega);
/// Rotation angle||omega|| <= pi. At exactly pi the axis is chosen with its
/// first nonzero component positive.
Vec3 so3_log(const Mat3& R);

/// Twist ordering is (omega, v).
SE3 se3_exp(const Vec6& xi);
Vec6 se3_log(const SE3& X);

/// Hamilton quaternion as (qx, qy, qz, qw), normalized with qw >= 0.
Vec4 rotation_to_quat(const Mat3& R);
Mat3 quat_to_rotation(const Vec4& q);

/// Throws on X.z <= 0 ("behind-camera point").
Vec2 project(const Intrinsics& K, const Vec3& X);
/// Throws on d <= 0 ("non-positive depth").
Vec3 unproject(const Intrinsics& K, const Vec2& p, double d);

enum class AlignMode { SE3, Sim3 };

struct TrajectoryAlignment {
  double scale = 1.0;  // 1 in SE3 mode
  SE3 transform;       // maps estimated centers onto reference centers
  double ate_rmse = 0.0;
};

/// Least-squares alignment of the estimated positions (the translation
/// component of each pose) onto the reference positions, and the RMSE of the
/// aligned residuals. Sim3 mode additionally estimates a scale factor.
TrajectoryAlignment align_trajectories(std::span<const SE3> est,
                                       std::span<const SE3> ref,
                                       AlignMode mode);

}  // namespace rigidtrack
