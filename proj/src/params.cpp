#include "rigidtrack/params.hpp"

#include <stdexcept>

namespace rigidtrack {

std::string ParamLayout::coordinate_name(Eigen::Index flat_index) const {
  if (flat_index < 0 || flat_index >= size()) return "out-of-range[" + std::to_string(flat_index) + "]";
  auto cell = [](const char* base, Eigen::Index idx, Eigen::Index cols) {
    return std::string(base) + "[" + std::to_string(idx / cols) + "][" + std::to_string(idx % cols) + "]";
  };
  if (flat_index < embedding_offset()) {
    return cell("log_depths", flat_index, n_frames);
  }
  if (flat_index < confidence_offset()) {
    return cell("embeddings", flat_index - embedding_offset(), embed_dim);
  }
  return cell("confidence_logits", flat_index - confidence_offset(), n_frames - 1);
}

ParamLayout SceneParams::layout() const {
  ParamLayout l;
  l.n_tracks = log_depths.rows();
  l.n_frames = log_depths.cols();
  l.embed_dim = embeddings.cols();
  return l;
}

namespace {

// Row-major flattening per block keeps coordinate_name() in sync.
void write_block(Eigen::VectorXd& flat, Eigen::Index offset, const Eigen::MatrixXd& m) {
  Eigen::Index k = offset;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat[k++] = m(i, j);
  }
}

Eigen::MatrixXd read_block(const Eigen::VectorXd& flat, Eigen::Index offset, Eigen::Index rows,
                           Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index k = offset;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = flat[k++];
  }
  return m;
}

}  // namespace

Eigen::VectorXd SceneParams::pack() const {
  const ParamLayout l = layout();
  if (confidence_logits.rows() != l.n_tracks || confidence_logits.cols() != l.n_frames - 1 ||
      embeddings.rows() != l.n_tracks) {
    throw std::invalid_argument("scene params: field shapes disagree");
  }
  Eigen::VectorXd flat(l.size());
  write_block(flat, l.log_depth_offset(), log_depths);
  write_block(flat, l.embedding_offset(), embeddings);
  write_block(flat, l.confidence_offset(), confidence_logits);
  return flat;
}

SceneParams SceneParams::unpack(const ParamLayout& l, const Eigen::VectorXd& flat) {
  if (flat.size() != l.size()) {
    throw std::invalid_argument("scene params: flat vector does not match layout size");
  }
  SceneParams p;
  p.log_depths = read_block(flat, l.log_depth_offset(), l.n_tracks, l.n_frames);
  p.embeddings = read_block(flat, l.embedding_offset(), l.n_tracks, l.embed_dim);
  p.confidence_logits = read_block(flat, l.confidence_offset(), l.n_tracks, l.n_frames - 1);
  return p;
}

SceneParams SceneParams::default_init(const ParamLayout& l, uint64_t seed) {
  if (l.n_tracks < 1 || l.n_frames < 2 || l.embed_dim < 1) {
    throw std::invalid_argument("scene params: layout needs N >= 1, T >= 2, M >= 1");
  }
  SceneParams p;
  p.log_depths = Eigen::MatrixXd::Zero(l.n_tracks, l.n_frames);
  p.embeddings = RigidityEmbeddings::init(l.n_tracks, l.embed_dim, seed).features;
  p.confidence_logits = Eigen::MatrixXd::Constant(l.n_tracks, l.n_frames - 1, 2.0);
  return p;
}

}  // namespace rigidtrack
