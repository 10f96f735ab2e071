#include "rigidtrack/procrustes.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <stdexcept>

namespace rigidtrack {

namespace {

void check_shapes(const WeightedCorrespondences& c) {
  const Eigen::Index m = c.source.rows();
  if (c.target.rows() != m || c.weights.size() != m) {
    throw std::invalid_argument("weighted correspondences: shape mismatch");
  }
  if ((c.weights.array() < 0.0).any()) {
    throw std::invalid_argument("weighted correspondences: negative weight");
  }
}

}  // namespace

ProcrustesSolution solve_weighted_procrustes_detail(const WeightedCorrespondences& c,
                                                    SolveMode mode) {
  check_shapes(c);
  ProcrustesSolution out;

  const Eigen::Index effective = (c.weights.array() > kWeightFloor).count();
  if (effective < 3) {
    if (mode == SolveMode::Strict) throw std::runtime_error("underdetermined pose");
    return out;  // valid = false
  }

  const double W = c.weights.sum();
  out.weight_sum = W;
  out.source_centroid = c.source.transpose() * c.weights / W;
  out.target_centroid = c.target.transpose() * c.weights / W;

  // A = sum_i w_i * (target_i - tc)(source_i - sc)^T, accumulated uncentered.
  Mat3 A = c.target.transpose() * (c.source.array().colwise() * c.weights.array()).matrix() -
           W * out.target_centroid * out.source_centroid.transpose();

  Eigen::JacobiSVD<Mat3> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3 sv = svd.singularValues();
  out.rank_ratio = sv(0) > 0.0 ? sv(1) / sv(0) : 0.0;

  if (out.rank_ratio < kDegenerateRankRatio && mode == SolveMode::Strict) {
    throw std::runtime_error("degenerate configuration");
  }
  if (out.rank_ratio < kDampedRankRatio && mode == SolveMode::Damped) {
    A += kTikhonovDamping * Mat3::Identity();
    svd.compute(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.damped = true;
  }
  out.cross_cov = A;

  Mat3 R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    R = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  out.transform.R = R;
  out.transform.t = out.target_centroid - R * out.source_centroid;
  // Symmetrized for the pullback; exactly symmetric at the optimum.
  const Mat3 S = R.transpose() * A;
  out.symmetric_factor = 0.5 * (S + S.transpose());
  out.valid = true;
  return out;
}

SE3 solve_weighted_procrustes(const WeightedCorrespondences& c) {
  return solve_weighted_procrustes_detail(c, SolveMode::Strict).transform;
}

double procrustes_residual(const WeightedCorrespondences& c, const SE3& X) {
  check_shapes(c);
  const Eigen::MatrixX3d moved =
      (c.source * X.R.transpose()).rowwise() + X.t.transpose();
  return (c.weights.array() * (c.target - moved).rowwise().squaredNorm().array()).sum();
}

void procrustes_pullback(const WeightedCorrespondences& c, const ProcrustesSolution& sol,
                         const Mat3& grad_R, const Vec3& grad_t,
                         Eigen::Ref<Eigen::MatrixX3d> grad_source,
                         Eigen::Ref<Eigen::MatrixX3d> grad_target,
                         Eigen::Ref<Eigen::VectorXd> grad_weights) {
  if (!sol.valid) {
    throw std::logic_error("procrustes_pullback: solution is not valid");
  }
  const Mat3& R = sol.transform.R;
  const double W = sol.weight_sum;

  // Translation path: t = qc - R * pc.
  const Mat3 GR = grad_R - grad_t * sol.source_centroid.transpose();
  const Vec3 Rt_grad_t = R.transpose() * grad_t;

  // Rotation path. With A = R * S (S symmetric), a perturbation dA moves the
  // polar factor by dR = R * [omega]x where
  //   (tr(S) I - S) omega = vee(R^T dA - dA^T R).
  // Pulling grad_R back through that linear map gives grad_A = R * [mu]x with
  //   (tr(S) I - S) mu = vee(R^T GR - GR^T R).
  const Mat3 M = R.transpose() * GR;
  const Vec3 g(M(2, 1) - M(1, 2), M(0, 2) - M(2, 0), M(1, 0) - M(0, 1));
  const Mat3 B = sol.symmetric_factor.trace() * Mat3::Identity() - sol.symmetric_factor;

  Eigen::SelfAdjointEigenSolver<Mat3> eig(B);
  Vec3 lam = eig.eigenvalues();
  const double lam_floor = 1e-6 * std::max(lam.cwiseAbs().maxCoeff(), 0.0) + 1e-300;
  for (int k = 0; k < 3; ++k) lam(k) = std::max(lam(k), lam_floor);
  const Vec3 mu = eig.eigenvectors() *
                  (eig.eigenvectors().transpose() * g).cwiseQuotient(lam);
  const Mat3 GA = R * skew(mu);

  // Through A, the centroids and the weighted sums. Centered coordinates make
  // the centroid-through-A terms vanish (weighted deviations sum to zero).
  const Eigen::MatrixX3d Xc = c.source.rowwise() - sol.source_centroid.transpose();
  const Eigen::MatrixX3d Yc = c.target.rowwise() - sol.target_centroid.transpose();

  grad_weights += ((Yc * GA).cwiseProduct(Xc)).rowwise().sum();
  grad_weights += (Yc * grad_t) / W;
  grad_weights -= (Xc * Rt_grad_t) / W;

  grad_source += ((Yc * GA).array().colwise() * c.weights.array()).matrix();
  grad_source -= (c.weights / W) * Rt_grad_t.transpose();

  grad_target += ((Xc * GA.transpose()).array().colwise() * c.weights.array()).matrix();
  grad_target += (c.weights / W) * grad_t.transpose();
}

}  // namespace rigidtrack
