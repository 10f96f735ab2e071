// Synthetic multi-rigid-body scene generator. Serves as the ground-truth
// oracle for the end-to-end tests: every generated quantity (depths, body
// assignments, trajectories) is stored alongside the rendered tracks.

#pragma once

#include "rigidtrack/trackset.hpp"

#include <vector>

namespace rigidtrack {

struct SceneSpec {
  int n_bodies = 1;           // moving bodies; the static background is body 0
  int tracks_per_body = 64;
  int n_static_tracks = 128;
  int frames = 10;
  Intrinsics intrinsics{500.0, 500.0, 319.5, 239.5};
  int width = 640;
  int height = 480;
  double motion_magnitude = 0.06;  // scene units of translation per frame
  double pixel_noise_sigma = 0.0;
  uint64_t rng_seed = 0;

  void validate() const;
};

struct SyntheticScene {
  TrackSet tracks;
  std::vector<int> body_of_track;                   // 0 = static background
  std::vector<std::vector<SE3>> body_trajectories;  // [b-1][t], world motion, identity at t=0
  std::vector<SE3> camera_trajectory;               // world-to-camera per frame
  Eigen::MatrixXd gt_depths;                        // N x T camera-frame depths
  SceneSpec spec;

  /// Camera-frame rigid motion of track i between frames t and t+1:
  /// X_cam(t+1) = pair_transform(i, t) * X_cam(t).
  SE3 pair_transform(Eigen::Index i, Eigen::Index t) const;

  /// Max pixel error of reprojecting each visible track through gt depth and
  /// the generating transforms. ~0 for noise-free scenes.
  double max_reprojection_error() const;
};

SyntheticScene generate_scene(const SceneSpec& spec);

void save_scene_ground_truth(const SyntheticScene& scene, const std::filesystem::path& path);

struct SceneGroundTruth {
  std::vector<int> body_of_track;
  std::vector<std::vector<SE3>> body_trajectories;
  std::vector<SE3> camera_trajectory;
  Eigen::MatrixXd gt_depths;
};

SceneGroundTruth load_scene_ground_truth(const std::filesystem::path& path);

}  // namespace rigidtrack
