#include "rigidtrack/rigidity.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <stdexcept>

namespace rigidtrack {

namespace {

constexpr double kSnapToOne = 4.0 * std::numeric_limits<double>::epsilon();

double clamped_cosine(double dot, double ni, double nj) {
  const double denom = std::max(ni * nj, kCosineDenomFloor);
  double c = dot / denom;
  if (c >= 1.0 - kSnapToOne) return 1.0;
  return c > 0.0 ? c : 0.0;
}

}  // namespace

RigidityEmbeddings RigidityEmbeddings::init(Eigen::Index n_tracks, Eigen::Index dim, uint64_t seed) {
  if (n_tracks < 1 || dim < 1) {
    throw std::invalid_argument("rigidity embeddings need n_tracks >= 1 and dim >= 1");
  }
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  RigidityEmbeddings emb;
  emb.features.resize(n_tracks, dim);
  for (Eigen::Index i = 0; i < n_tracks; ++i) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      double u1 = 0.0;
      do {
        u1 = uniform();
      } while (u1 <= 1e-300);
      const double u2 = uniform();
      emb.features(i, k) = 1.0 + 0.1 * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
  }
  return emb;
}

Eigen::VectorXd rigidity_mask(const RigidityEmbeddings& emb, Eigen::Index i) {
  const Eigen::Index n = emb.track_count();
  if (i < 0 || i >= n) {
    throw std::invalid_argument("rigidity_mask: track index out of range");
  }
  const Eigen::VectorXd norms = emb.features.rowwise().norm();
  const Eigen::VectorXd dots = emb.features * emb.features.row(i).transpose();
  Eigen::VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out[j] = clamped_cosine(dots[j], norms[i], norms[j]);
  }
  out[i] = 1.0;
  return out;
}

Eigen::MatrixXd rigidity_matrix(const RigidityEmbeddings& emb) {
  const Eigen::Index n = emb.track_count();
  const Eigen::VectorXd norms = emb.features.rowwise().norm();
  Eigen::MatrixXd gram = emb.features * emb.features.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    gram(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double c = clamped_cosine(gram(i, j), norms[i], norms[j]);
      gram(i, j) = c;
      gram(j, i) = c;
    }
  }
  return gram;
}

std::vector<std::vector<Eigen::VectorXd>> rigidity_response_grid(
    const RigidityEmbeddings& emb, const std::vector<std::vector<Eigen::Index>>& track_grid) {
  std::vector<std::vector<Eigen::VectorXd>> grid;
  grid.reserve(track_grid.size());
  for (const auto& row : track_grid) {
    std::vector<Eigen::VectorXd> out_row;
    out_row.reserve(row.size());
    for (Eigen::Index idx : row) {
      out_row.push_back(rigidity_mask(emb, idx));
    }
    grid.push_back(std::move(out_row));
  }
  return grid;
}

Eigen::MatrixXd feature_pca(const RigidityEmbeddings& emb, int k) {
  const Eigen::Index n = emb.track_count();
  const Eigen::Index m = emb.dim();
  if (k < 1 || n < k) {
    throw std::invalid_argument("feature_pca: need N >= k >= 1");
  }
  const int kk = std::min<Eigen::Index>(k, m);

  Eigen::MatrixXd centered = emb.features.rowwise() - emb.features.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / std::max<Eigen::Index>(n - 1, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, k);
  for (int c = 0; c < kk; ++c) {
    Eigen::VectorXd comp = eig.eigenvectors().col(m - 1 - c);  // decreasing variance
    Eigen::Index argmax = 0;
    comp.cwiseAbs().maxCoeff(&argmax);
    if (comp[argmax] < 0.0) comp = -comp;
    out.col(c) = centered * comp;
  }
  return out;
}

}  // namespace rigidtrack
