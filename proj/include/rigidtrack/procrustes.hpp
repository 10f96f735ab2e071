// Weighted least-squares SE(3) estimation between two weighted 3D point sets:
//   argmin over (R, t) of  sum_i w_i * || target_i - (R * source_i + t) ||^2
// solved through weighted centroids, the weighted cross-covariance and its
// sign-corrected polar factor (SVD with the Kabsch reflection fix).

#pragma once

#include "rigidtrack/geometry.hpp"

#include <Eigen/Core>

namespace rigidtrack {

constexpr double kWeightFloor = 1e-8;
constexpr double kDegenerateRankRatio = 1e-6;
constexpr double kDampedRankRatio = 1e-3;
constexpr double kTikhonovDamping = 1e-6;

struct WeightedCorrespondences {
  Eigen::MatrixX3d source;   // M x 3, frame t, camera coordinates
  Eigen::MatrixX3d target;   // M x 3, frame t+1, camera coordinates
  Eigen::VectorXd weights;   // M, non-negative
};

/// Strict mode throws on underdetermined/degenerate input (user-facing
/// solves). Damped mode instead regularizes near-degenerate cross-covariances
/// with Tikhonov damping and reports unusable systems through `valid` —
/// optimization passes through bad intermediate states without hard errors.
enum class SolveMode { Strict, Damped };

struct ProcrustesSolution {
  bool valid = false;
  SE3 transform;

  // Intermediates kept for implicit differentiation of the solve.
  Vec3 source_centroid = Vec3::Zero();
  Vec3 target_centroid = Vec3::Zero();
  double weight_sum = 0.0;
  Mat3 cross_cov = Mat3::Zero();        // damped value when damping applied
  Mat3 symmetric_factor = Mat3::Zero(); // S = R^T * cross_cov
  double rank_ratio = 0.0;              // sigma_2 / sigma_1 of cross_cov
  bool damped = false;
};

ProcrustesSolution solve_weighted_procrustes_detail(const WeightedCorrespondences& c,
                                                    SolveMode mode);

/// Strict solve; throws "underdetermined pose" / "degenerate configuration".
SE3 solve_weighted_procrustes(const WeightedCorrespondences& c);

/// Value of the weighted objective at X.
double procrustes_residual(const WeightedCorrespondences& c, const SE3& X);

/// Reverse-mode adjoint of the solve: given dL/dR and dL/dt at the solution,
/// accumulates dL/d(source), dL/d(target) and dL/d(weights). Differentiates
/// the stationarity conditions of the polar factor; near-singular systems
/// (repeated/degenerate singular values) get their eigenvalues floored, which
/// is the damped implicit path.
void procrustes_pullback(const WeightedCorrespondences& c, const ProcrustesSolution& sol,
                         const Mat3& grad_R, const Vec3& grad_t,
                         Eigen::Ref<Eigen::MatrixX3d> grad_source,
                         Eigen::Ref<Eigen::MatrixX3d> grad_target,
                         Eigen::Ref<Eigen::VectorXd> grad_weights);

}  // namespace rigidtrack
