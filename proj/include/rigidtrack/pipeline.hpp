// The training forward pass: per frame pair, unproject joint-visible tracks
// through the current depths, solve one weighted rigid transform per query
// track (confidence times rigidity weights), transport the query point,
// reproject, and penalize the deviation from the observed track. The same
// class evaluates the analytic reverse-mode gradient of that scalar loss.

#pragma once

#include "rigidtrack/epipolar.hpp"
#include "rigidtrack/gradient.hpp"
#include "rigidtrack/params.hpp"
#include "rigidtrack/procrustes.hpp"
#include "rigidtrack/trackset.hpp"

#include <optional>
#include <vector>

namespace rigidtrack {

struct LossConfig {
  double lambda_depth = 0.0;  // 0 disables depth supervision
  double robust_delta = 4.0;  // pixels; infinity = pure squared penalty
  bool use_static_override = false;
  double sampson_threshold = kDefaultSampsonThresholdPx2;

  void validate() const;
};

/// Per-track, per-adjacent-frame-pair rigid transforms.
struct SE3Field {
  Eigen::Index n_tracks = 0;
  Eigen::Index n_pairs = 0;
  std::vector<SE3> transforms;  // row-major (track, pair)
  std::vector<uint8_t> valid;

  void resize(Eigen::Index tracks, Eigen::Index pairs);
  bool has(Eigen::Index i, Eigen::Index t) const { return valid[index(i, t)] != 0; }
  const SE3& at(Eigen::Index i, Eigen::Index t) const { return transforms[index(i, t)]; }
  SE3& at(Eigen::Index i, Eigen::Index t) { return transforms[index(i, t)]; }
  size_t index(Eigen::Index i, Eigen::Index t) const {
    return static_cast<size_t>(i * n_pairs + t);
  }
};

struct ForwardResult {
  double loss = 0.0;
  SE3Field field;
  Eigen::MatrixXd pixel_residuals;  // N x (T-1); NaN where unsupervised
  Eigen::Index supervised_count = 0;
  std::vector<Eigen::Index> skipped_pairs;

  double mean_pixel_residual() const;
};

/// The scalar training loss over a fixed track set. Holds only immutable
/// precomputed data; evaluations are safe to run concurrently.
class PipelineLoss final : public Objective {
 public:
  PipelineLoss(TrackSet tracks, ParamLayout layout, LossConfig config,
               std::optional<Eigen::MatrixXd> gt_depths = std::nullopt,
               bool static_mode = false, int threads = 1);

  double value(const Eigen::VectorXd& theta) const override;
  double value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const override;
  const ParamLayout* param_layout() const override { return &layout_; }

  ForwardResult forward(const SceneParams& params) const;
  double loss_and_gradient(const SceneParams& params, SceneParams& grad) const;

  const TrackSet& tracks() const { return tracks_; }
  const ParamLayout& layout() const { return layout_; }
  const LossConfig& config() const { return config_; }
  bool static_mode() const { return static_mode_; }
  const std::vector<std::vector<uint8_t>>& static_masks() const { return static_masks_; }

 private:
  struct PairScratch;
  struct Accumulation;

  void process_pair(Eigen::Index t, const SceneParams& params, const Eigen::MatrixXd& rig,
                    const Eigen::MatrixXd& conf, bool with_grad, PairScratch& scratch) const;
  double run(const SceneParams& params, ForwardResult* result, SceneParams* grad) const;
  void depth_term(const SceneParams& params, double& loss, SceneParams* grad) const;

  TrackSet tracks_;
  ParamLayout layout_;
  LossConfig config_;
  std::optional<Eigen::MatrixXd> gt_depths_;
  bool static_mode_ = false;
  int threads_ = 1;

  Eigen::MatrixXd ray_x_, ray_y_;                  // K^-1 directions, z = 1
  std::vector<std::vector<Eigen::Index>> joint_;   // joint-visible tracks per pair
  std::vector<Eigen::Index> usable_pairs_;
  std::vector<Eigen::Index> skipped_pairs_;
  std::vector<std::vector<uint8_t>> static_masks_; // per pair; empty when unused
  double gt_depth_median_ = 1.0;
};

/// One-shot forward evaluation (builds the loss object internally).
ForwardResult forward_pass(const TrackSet& tracks, const SceneParams& params,
                           const LossConfig& config,
                           std::optional<Eigen::MatrixXd> gt_depths = std::nullopt);

}  // namespace rigidtrack
