#include "rigidtrack/geometry.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace rigidtrack {

namespace {
constexpr double kSmallAngle = 1e-10;
}

Intrinsics::Intrinsics(double fx_, double fy_, double cx_, double cy_)
    : fx(fx_), fy(fy_), cx(cx_), cy(cy_) {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw std::invalid_argument("intrinsics: focal lengths must be positive");
  }
}

Mat3 Intrinsics::matrix() const {
  Mat3 K = Mat3::Identity();
  K(0, 0) = fx;
  K(1, 1) = fy;
  K(0, 2) = cx;
  K(1, 2) = cy;
  return K;
}

Mat3 Intrinsics::inverse_matrix() const {
  Mat3 Ki = Mat3::Identity();
  Ki(0, 0) = 1.0 / fx;
  Ki(1, 1) = 1.0 / fy;
  Ki(0, 2) = -cx / fx;
  Ki(1, 2) = -cy / fy;
  return Ki;
}

SE3 SE3::from_matrix(const Mat4& m) {
  return SE3(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

SE3 SE3::inverse() const {
  SE3 out;
  out.R = R.transpose();
  out.t = -(out.R * t);
  return out;
}

SE3 SE3::operator*(const SE3& rhs) const {
  SE3 out;
  out.R = R * rhs.R;
  out.t = R * rhs.t + t;
  return out;
}

Mat4 SE3::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = R;
  m.topRightCorner<3, 1>() = t;
  return m;
}

bool is_rotation(const Mat3& R, double tol) {
  const Mat3 err = R * R.transpose() - Mat3::Identity();
  return err.cwiseAbs().maxCoeff() <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return s;
}

Mat3 so3_exp(const Vec3& omega) {
  const double theta = omega.norm();
  if (theta < kSmallAngle) {
    // Second-order expansion keeps exp/log round-trips tight near zero.
    const Mat3 W = skew(omega);
    return Mat3::Identity() + W + 0.5 * W * W;
  }
  const Vec3 axis = omega / theta;
  const Mat3 W = skew(axis);
  return Mat3::Identity() + std::sin(theta) * W + (1.0 - std::cos(theta)) * W * W;
}

Vec3 so3_log(const Mat3& R) {
  const double cos_theta = std::min(1.0, std::max(-1.0, (R.trace() - 1.0) * 0.5));
  const double theta = std::acos(cos_theta);
  const Vec3 v(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));

  if (theta < kSmallAngle) {
    return 0.5 * v;
  }
  if (theta > M_PI - 1e-6) {
    // Near pi the off-diagonal difference vanishes; recover the axis from the
    // symmetric part instead. Axis sign: first nonzero component positive.
    const Mat3 S = 0.5 * (R + Mat3::Identity());
    Vec3 axis(std::sqrt(std::max(0.0, S(0, 0))),
              std::sqrt(std::max(0.0, S(1, 1))),
              std::sqrt(std::max(0.0, S(2, 2))));
    // Fix relative signs from the off-diagonal products.
    int k = 0;
    for (int i = 1; i < 3; ++i) {
      if (axis[i] > axis[k]) k = i;
    }
    for (int i = 0; i < 3; ++i) {
      if (i == k) continue;
      if (S(k, i) < 0.0) axis[i] = -axis[i];
    }
    for (int i = 0; i < 3; ++i) {
      if (std::abs(axis[i]) > 1e-12) {
        if (axis[i] < 0.0) axis = -axis;
        break;
      }
    }
    axis.normalize();
    // Refine theta from the trace; sin-based recovery is ill-conditioned here.
    return theta * axis;
  }
  return (theta / (2.0 * std::sin(theta))) * v;
}

namespace {

// V(omega) such that exp([omega, v]) has translation V * v.
Mat3 so3_left_jacobian(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 W = skew(omega);
  if (theta < kSmallAngle) {
    return Mat3::Identity() + 0.5 * W + (1.0 / 6.0) * W * W;
  }
  const double t2 = theta * theta;
  const double a = (1.0 - std::cos(theta)) / t2;
  const double b = (theta - std::sin(theta)) / (t2 * theta);
  return Mat3::Identity() + a * W + b * W * W;
}

Mat3 so3_left_jacobian_inverse(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 W = skew(omega);
  if (theta < kSmallAngle) {
    return Mat3::Identity() - 0.5 * W + (1.0 / 12.0) * W * W;
  }
  const double half = 0.5 * theta;
  const double cot = 1.0 / std::tan(half);
  const double c = (1.0 - half * cot) / (theta * theta);
  return Mat3::Identity() - 0.5 * W + c * W * W;
}

}  // namespace

SE3 se3_exp(const Vec6& xi) {
  const Vec3 omega = xi.head<3>();
  const Vec3 v = xi.tail<3>();
  SE3 out;
  out.R = so3_exp(omega);
  out.t = so3_left_jacobian(omega) * v;
  return out;
}

Vec6 se3_log(const SE3& X) {
  const Vec3 omega = so3_log(X.R);
  Vec6 xi;
  xi.head<3>() = omega;
  xi.tail<3>() = so3_left_jacobian_inverse(omega) * X.t;
  return xi;
}

Vec4 rotation_to_quat(const Mat3& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return Vec4(q.x(), q.y(), q.z(), q.w());
}

Mat3 quat_to_rotation(const Vec4& q) {
  Eigen::Quaterniond quat(q[3], q[0], q[1], q[2]);
  quat.normalize();
  return quat.toRotationMatrix();
}

Vec2 project(const Intrinsics& K, const Vec3& X) {
  if (!(X.z() > 0.0)) {
    throw std::invalid_argument("behind-camera point");
  }
  return Vec2(K.fx * X.x() / X.z() + K.cx, K.fy * X.y() / X.z() + K.cy);
}

Vec3 unproject(const Intrinsics& K, const Vec2& p, double d) {
  if (!(d > 0.0)) {
    throw std::invalid_argument("non-positive depth");
  }
  return Vec3(d * (p.x() - K.cx) / K.fx, d * (p.y() - K.cy) / K.fy, d);
}

TrajectoryAlignment align_trajectories(std::span<const SE3> est,
                                       std::span<const SE3> ref,
                                       AlignMode mode) {
  if (est.size() != ref.size() || est.size() < 3) {
    throw std::invalid_argument("underdetermined alignment");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(est.size());
  Eigen::Matrix3Xd src(3, n), dst(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    src.col(i) = est[static_cast<size_t>(i)].t;
    dst.col(i) = ref[static_cast<size_t>(i)].t;
  }

  for (const auto* pts : {&src, &dst}) {
    Eigen::Matrix3Xd centered = pts->colwise() - pts->rowwise().mean();
    Eigen::JacobiSVD<Eigen::Matrix3Xd> svd(centered);
    const auto& sv = svd.singularValues();
    if (sv(0) < 1e-12 || sv(1) < 1e-9 * sv(0)) {
      throw std::invalid_argument("degenerate alignment");
    }
  }

  const Mat4 T = Eigen::umeyama(src, dst, mode == AlignMode::Sim3);
  TrajectoryAlignment out;
  const Mat3 sR = T.topLeftCorner<3, 3>();
  out.scale = std::cbrt(sR.determinant());
  out.transform.R = sR / out.scale;
  out.transform.t = T.topRightCorner<3, 1>();

  double sq_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 aligned = sR * src.col(i) + out.transform.t;
    sq_sum += (dst.col(i) - aligned).squaredNorm();
  }
  out.ate_rmse = std::sqrt(sq_sum / static_cast<double>(n));
  return out;
}

}  // namespace rigidtrack
