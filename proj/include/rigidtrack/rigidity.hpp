// Per-track rigidity embeddings and the soft rigidity masks derived from
// their clamped cosine similarity. Two tracks with similar embeddings are
// treated as belonging to the same rigid body.

#pragma once

#include "rigidtrack/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace rigidtrack {

constexpr int kDefaultEmbeddingDim = 16;
constexpr double kCosineDenomFloor = 1e-12;

struct RigidityEmbeddings {
  Eigen::MatrixXd features;  // N x M, rows stored unnormalized

  Eigen::Index track_count() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  /// Near-rigid start: every row is a shared all-ones vector plus isotropic
  /// Gaussian noise of sigma 0.1, so early solves see an almost-static scene.
  static RigidityEmbeddings init(Eigen::Index n_tracks, Eigen::Index dim, uint64_t seed);
};

/// Clamped cosine similarity of track i's embedding against all rows:
/// out[j] = max(0, cos(f_i, f_j)), out[i] = 1. Values within a few ulps of 1
/// are snapped to exactly 1 so identical embeddings yield exact full rigidity.
Eigen::VectorXd rigidity_mask(const RigidityEmbeddings& emb, Eigen::Index i);

/// All N masks at once (symmetric N x N matrix, unit diagonal).
Eigen::MatrixXd rigidity_matrix(const RigidityEmbeddings& emb);

/// One rigidity mask per grid cell; cell (r, c) holds the mask of the track
/// index stored there. Export/visualization helper.
std::vector<std::vector<Eigen::VectorXd>> rigidity_response_grid(
    const RigidityEmbeddings& emb, const std::vector<std::vector<Eigen::Index>>& track_grid);

/// Projection of the mean-centered rows onto their top-k principal
/// components, ordered by decreasing variance; each component's sign is fixed
/// so its largest-magnitude loading is positive.
Eigen::MatrixXd feature_pca(const RigidityEmbeddings& emb, int k = 3);

}  // namespace rigidtrack
