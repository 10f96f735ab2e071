// Flat parameter vector with a named layout: per-track log-depths, rigidity
// embeddings and per-frame-pair confidence logits.

#pragma once

#include "rigidtrack/rigidity.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>

namespace rigidtrack {

struct ParamLayout {
  Eigen::Index n_tracks = 0;
  Eigen::Index n_frames = 0;
  Eigen::Index embed_dim = kDefaultEmbeddingDim;

  Eigen::Index log_depth_count() const { return n_tracks * n_frames; }
  Eigen::Index embedding_count() const { return n_tracks * embed_dim; }
  Eigen::Index confidence_count() const { return n_tracks * (n_frames - 1); }
  Eigen::Index size() const { return log_depth_count() + embedding_count() + confidence_count(); }

  Eigen::Index log_depth_offset() const { return 0; }
  Eigen::Index embedding_offset() const { return log_depth_count(); }
  Eigen::Index confidence_offset() const { return log_depth_count() + embedding_count(); }

  /// "log_depths[i][t]", "embeddings[i][k]" or "confidence_logits[i][t]".
  std::string coordinate_name(Eigen::Index flat_index) const;

  bool operator==(const ParamLayout&) const = default;
};

struct SceneParams {
  Eigen::MatrixXd log_depths;         // N x T
  Eigen::MatrixXd embeddings;         // N x M
  Eigen::MatrixXd confidence_logits;  // N x (T-1)

  ParamLayout layout() const;
  Eigen::VectorXd pack() const;
  static SceneParams unpack(const ParamLayout& layout, const Eigen::VectorXd& flat);

  /// Neutral start: unit depth plane, near-rigid embeddings (seeded), logits
  /// at +2 (confidence ~ 0.88).
  static SceneParams default_init(const ParamLayout& layout, uint64_t seed);
};

}  // namespace rigidtrack
