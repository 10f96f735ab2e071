#include "rigidtrack/epipolar.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <random>

namespace rigidtrack {

double sampson_distance(const Mat3& F, const Vec2& p0, const Vec2& p1) {
  const Vec3 x0(p0.x(), p0.y(), 1.0);
  const Vec3 x1(p1.x(), p1.y(), 1.0);
  const Vec3 Fx0 = F * x0;
  const Vec3 Ftx1 = F.transpose() * x1;
  const double e = x1.dot(Fx0);
  const double denom = Fx0.head<2>().squaredNorm() + Ftx1.head<2>().squaredNorm();
  if (denom < 1e-300) return std::numeric_limits<double>::infinity();
  return e * e / denom;
}

namespace {

// Least-squares 8-point solve with Hartley normalization; input points are in
// normalized camera coordinates. Returns the rank-2 fundamental matrix.
bool eight_point(const std::vector<Vec2>& a, const std::vector<Vec2>& b, Mat3& F_out) {
  const size_t m = a.size();
  if (m < 8) return false;

  auto normalizer = [](const std::vector<Vec2>& pts) {
    Vec2 mean = Vec2::Zero();
    for (const Vec2& p : pts) mean += p;
    mean /= static_cast<double>(pts.size());
    double rms = 0.0;
    for (const Vec2& p : pts) rms += (p - mean).squaredNorm();
    rms = std::sqrt(rms / static_cast<double>(pts.size()));
    const double s = rms > 1e-12 ? std::sqrt(2.0) / rms : 1.0;
    Mat3 T = Mat3::Identity();
    T(0, 0) = T(1, 1) = s;
    T(0, 2) = -s * mean.x();
    T(1, 2) = -s * mean.y();
    return T;
  };
  const Mat3 T0 = normalizer(a);
  const Mat3 T1 = normalizer(b);

  Eigen::MatrixXd A(static_cast<Eigen::Index>(m), 9);
  for (size_t k = 0; k < m; ++k) {
    const Vec3 x0 = T0 * Vec3(a[k].x(), a[k].y(), 1.0);
    const Vec3 x1 = T1 * Vec3(b[k].x(), b[k].y(), 1.0);
    A.row(static_cast<Eigen::Index>(k)) << x1.x() * x0.x(), x1.x() * x0.y(), x1.x(),
        x1.y() * x0.x(), x1.y() * x0.y(), x1.y(), x0.x(), x0.y(), 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
  const Eigen::VectorXd f = svd.matrixV().col(8);
  Mat3 F;
  F << f(0), f(1), f(2), f(3), f(4), f(5), f(6), f(7), f(8);

  Eigen::JacobiSVD<Mat3> fsvd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3 sv = fsvd.singularValues();
  sv(2) = 0.0;
  F = fsvd.matrixU() * sv.asDiagonal() * fsvd.matrixV().transpose();

  F_out = T1.transpose() * F * T0;
  return F_out.allFinite();
}

}  // namespace

std::vector<uint8_t> sampson_static_mask(const TrackSet& tracks, Eigen::Index t,
                                         double threshold_px2) {
  const Eigen::Index n = tracks.track_count();
  if (t < 0 || t + 1 >= tracks.frame_count()) {
    throw std::invalid_argument("sampson_static_mask: frame pair out of range");
  }

  std::vector<Eigen::Index> joint;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (tracks.visible(i, t) && tracks.visible(i, t + 1)) joint.push_back(i);
  }
  if (joint.size() < 8) {
    throw std::runtime_error("underdetermined epipolar fit: need >= 8 joint-visible tracks, have " +
                             std::to_string(joint.size()));
  }
  const size_t m = joint.size();

  const Mat3 Kinv = tracks.intrinsics.inverse_matrix();
  auto to_norm = [&Kinv](const Vec2& p) {
    const Vec3 x = Kinv * Vec3(p.x(), p.y(), 1.0);
    return Vec2(x.x(), x.y());
  };
  std::vector<Vec2> n0(m), n1(m), p0(m), p1(m);
  for (size_t k = 0; k < m; ++k) {
    p0[k] = tracks.position(joint[k], t);
    p1[k] = tracks.position(joint[k], t + 1);
    n0[k] = to_norm(p0[k]);
    n1[k] = to_norm(p1[k]);
  }
  const Mat3 K = tracks.intrinsics.matrix();
  const Mat3 Kit = Kinv.transpose();
  auto to_pixel_fundamental = [&](const Mat3& Fn) { return Mat3(Kit * Fn * Kinv); };

  std::mt19937_64 rng(tracks.content_hash() ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(t + 1)));
  constexpr int kMaxIterations = 2000;
  constexpr double kConfidence = 0.99;

  size_t best_inliers = 0;
  Mat3 best_F = Mat3::Zero();
  std::vector<Eigen::Index> sample_pool(m);
  for (size_t k = 0; k < m; ++k) sample_pool[k] = static_cast<Eigen::Index>(k);
  std::vector<Vec2> sa(8), sb(8);

  double needed = kMaxIterations;
  for (int it = 0; it < kMaxIterations && it < needed; ++it) {
    for (size_t k = 0; k < 8; ++k) {  // partial Fisher-Yates
      const size_t j = k + static_cast<size_t>(rng() % (m - k));
      std::swap(sample_pool[k], sample_pool[j]);
      sa[k] = n0[static_cast<size_t>(sample_pool[k])];
      sb[k] = n1[static_cast<size_t>(sample_pool[k])];
    }
    Mat3 Fn;
    if (!eight_point(sa, sb, Fn)) continue;
    const Mat3 Fpx = to_pixel_fundamental(Fn);
    size_t inliers = 0;
    for (size_t k = 0; k < m; ++k) {
      if (sampson_distance(Fpx, p0[k], p1[k]) < threshold_px2) ++inliers;
    }
    if (inliers > best_inliers) {
      best_inliers = inliers;
      best_F = Fpx;
      const double w = static_cast<double>(inliers) / static_cast<double>(m);
      const double p_sample = std::pow(w, 8.0);
      if (p_sample >= 1.0 - 1e-12) break;
      needed = std::log(1.0 - kConfidence) / std::log(1.0 - p_sample);
    }
  }

  // Refit on the consensus set for a tighter model.
  if (best_inliers >= 8) {
    std::vector<Vec2> ia, ib;
    ia.reserve(best_inliers);
    ib.reserve(best_inliers);
    for (size_t k = 0; k < m; ++k) {
      if (sampson_distance(best_F, p0[k], p1[k]) < threshold_px2) {
        ia.push_back(n0[k]);
        ib.push_back(n1[k]);
      }
    }
    Mat3 Fn;
    if (eight_point(ia, ib, Fn)) {
      const Mat3 refit = to_pixel_fundamental(Fn);
      size_t inliers = 0;
      for (size_t k = 0; k < m; ++k) {
        if (sampson_distance(refit, p0[k], p1[k]) < threshold_px2) ++inliers;
      }
      if (inliers >= best_inliers) {
        best_inliers = inliers;
        best_F = refit;
      }
    }
  }

  std::vector<uint8_t> mask(static_cast<size_t>(n), 0);
  if (best_inliers == 0) return mask;
  for (size_t k = 0; k < m; ++k) {
    if (sampson_distance(best_F, p0[k], p1[k]) < threshold_px2) {
      mask[static_cast<size_t>(joint[k])] = 1;
    }
  }
  return mask;
}

Eigen::VectorXd merge_static_override(const Eigen::VectorXd& soft,
                                      const std::vector<uint8_t>& static_mask,
                                      Eigen::Index query) {
  if (static_mask.size() != static_cast<size_t>(soft.size())) {
    throw std::invalid_argument("merge_static_override: mask/weight size mismatch");
  }
  if (query < 0 || query >= soft.size()) {
    throw std::invalid_argument("merge_static_override: query index out of range");
  }
  Eigen::VectorXd out = soft;
  if (!static_mask[static_cast<size_t>(query)]) return out;
  for (Eigen::Index j = 0; j < soft.size(); ++j) {
    if (static_mask[static_cast<size_t>(j)]) out[j] = 1.0;
  }
  return out;
}

}  // namespace rigidtrack
