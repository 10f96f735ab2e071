#include "rigidtrack/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <random>

namespace rigidtrack {

namespace {

constexpr double kNearPlane = 0.05;

// Deterministic normal sampling; avoids std::normal_distribution's
// implementation-defined state.
class Gaussian {
 public:
  explicit Gaussian(std::mt19937_64& rng) : rng_(rng) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 1e-300);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  double uniform() {  // [0, 1)
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64& rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Per-frame twists, drawn once and smoothed with a 3-tap box filter so the
// integrated trajectory has no jerk. Rotation components are drawn smaller
// than translations to keep the scene in view.
std::vector<Vec6> smooth_twists(Gaussian& gauss, int steps, double magnitude, double rot_scale) {
  std::vector<Vec6> raw(static_cast<size_t>(std::max(steps, 0)));
  for (auto& xi : raw) {
    for (int k = 0; k < 3; ++k) xi[k] = rot_scale * gauss();
    for (int k = 3; k < 6; ++k) xi[k] = gauss();
  }
  std::vector<Vec6> smoothed(raw.size());
  const int n = static_cast<int>(raw.size());
  for (int i = 0; i < n; ++i) {
    Vec6 acc = Vec6::Zero();
    int count = 0;
    for (int j = i - 1; j <= i + 1; ++j) {
      if (j < 0 || j >= n) continue;
      acc += raw[static_cast<size_t>(j)];
      ++count;
    }
    smoothed[static_cast<size_t>(i)] = (magnitude / count) * acc;
  }
  return smoothed;
}

}  // namespace

void SceneSpec::validate() const {
  if (n_bodies < 0) throw std::invalid_argument("scene spec: n_bodies must be >= 0");
  if (n_bodies > 0 && tracks_per_body < 4) {
    throw std::invalid_argument("scene spec: tracks_per_body must be >= 4");
  }
  if (n_static_tracks < 8) throw std::invalid_argument("scene spec: n_static_tracks must be >= 8");
  if (frames < 2) throw std::invalid_argument("scene spec: frames must be >= 2");
  if (!(intrinsics.fx > 0) || !(intrinsics.fy > 0)) {
    throw std::invalid_argument("scene spec: focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) throw std::invalid_argument("scene spec: image size must be positive");
  if (pixel_noise_sigma < 0) throw std::invalid_argument("scene spec: pixel_noise_sigma must be >= 0");
  if (motion_magnitude < 0) throw std::invalid_argument("scene spec: motion_magnitude must be >= 0");
}

SE3 SyntheticScene::pair_transform(Eigen::Index i, Eigen::Index t) const {
  const int b = body_of_track[static_cast<size_t>(i)];
  const SE3& C0 = camera_trajectory[static_cast<size_t>(t)];
  const SE3& C1 = camera_trajectory[static_cast<size_t>(t) + 1];
  if (b == 0) {
    return C1 * C0.inverse();
  }
  const SE3& B0 = body_trajectories[static_cast<size_t>(b - 1)][static_cast<size_t>(t)];
  const SE3& B1 = body_trajectories[static_cast<size_t>(b - 1)][static_cast<size_t>(t) + 1];
  return C1 * B1 * B0.inverse() * C0.inverse();
}

double SyntheticScene::max_reprojection_error() const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < tracks.track_count(); ++i) {
    for (Eigen::Index t = 0; t + 1 < tracks.frame_count(); ++t) {
      if (!tracks.visible(i, t) || !tracks.visible(i, t + 1)) continue;
      const Vec3 X = unproject(tracks.intrinsics, tracks.position(i, t), gt_depths(i, t));
      const Vec3 Xn = pair_transform(i, t) * X;
      if (!(Xn.z() > 0.0)) return std::numeric_limits<double>::infinity();
      const Vec2 err = project(tracks.intrinsics, Xn) - tracks.position(i, t + 1);
      worst = std::max(worst, err.norm());
    }
  }
  return worst;
}

SyntheticScene generate_scene(const SceneSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.rng_seed);
  Gaussian gauss(rng);

  const int T = spec.frames;
  const Eigen::Index N =
      static_cast<Eigen::Index>(spec.n_bodies) * spec.tracks_per_body + spec.n_static_tracks;

  SyntheticScene scene;
  scene.spec = spec;

  // Camera: pose integrated from body-frame twists, then inverted to
  // world-to-camera. World frame = first camera frame.
  {
    const auto twists = smooth_twists(gauss, T - 1, spec.motion_magnitude, 0.25);
    std::vector<SE3> pose(static_cast<size_t>(T));
    pose[0] = SE3::identity();
    for (int t = 0; t + 1 < T; ++t) {
      pose[static_cast<size_t>(t) + 1] = pose[static_cast<size_t>(t)] * se3_exp(twists[static_cast<size_t>(t)]);
    }
    scene.camera_trajectory.resize(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
      scene.camera_trajectory[static_cast<size_t>(t)] = pose[static_cast<size_t>(t)].inverse();
    }
  }

  // Bodies: a rigid point cloud seeded inside the view frustum, rotating about
  // its own centroid while its centroid drifts.
  struct Body {
    Vec3 center;
    std::vector<Vec3> points;  // world coordinates at t = 0
  };
  std::vector<Body> bodies(static_cast<size_t>(spec.n_bodies));
  scene.body_trajectories.resize(static_cast<size_t>(spec.n_bodies));
  const double margin_x = 0.14 * spec.width;
  const double margin_y = 0.14 * spec.height;
  for (int b = 0; b < spec.n_bodies; ++b) {
    Body& body = bodies[static_cast<size_t>(b)];
    const double ux = margin_x * 1.5 + gauss.uniform() * (spec.width - 3.0 * margin_x);
    const double uy = margin_y * 1.5 + gauss.uniform() * (spec.height - 3.0 * margin_y);
    const double depth0 = 3.5 + 2.0 * gauss.uniform();
    const double radius_px = (0.10 + 0.06 * gauss.uniform()) * std::min(spec.width, spec.height);
    body.center = unproject(spec.intrinsics, Vec2(ux, uy), depth0);
    body.points.reserve(static_cast<size_t>(spec.tracks_per_body));
    for (int k = 0; k < spec.tracks_per_body; ++k) {
      const double ang = 2.0 * M_PI * gauss.uniform();
      const double rad = radius_px * std::sqrt(gauss.uniform());
      const Vec2 px(ux + rad * std::cos(ang), uy + rad * std::sin(ang));
      const double d = depth0 * (1.0 + 0.12 * (gauss.uniform() - 0.5));
      body.points.push_back(unproject(spec.intrinsics, px, d));
    }

    const auto twists = smooth_twists(gauss, T - 1, spec.motion_magnitude, 0.35);
    Mat3 Rb = Mat3::Identity();
    Vec3 tau = Vec3::Zero();
    auto& traj = scene.body_trajectories[static_cast<size_t>(b)];
    traj.resize(static_cast<size_t>(T));
    traj[0] = SE3::identity();
    for (int t = 0; t + 1 < T; ++t) {
      const Vec6& xi = twists[static_cast<size_t>(t)];
      Rb = so3_exp(xi.head<3>()) * Rb;
      tau += xi.tail<3>();
      // World motion with rotation anchored at the body centroid.
      traj[static_cast<size_t>(t) + 1] = SE3(Rb, body.center - Rb * body.center + tau);
    }
  }

  // Static background points spread across the image at mixed depths.
  std::vector<Vec3> static_points;
  static_points.reserve(static_cast<size_t>(spec.n_static_tracks));
  for (int k = 0; k < spec.n_static_tracks; ++k) {
    const double ux = margin_x + gauss.uniform() * (spec.width - 2.0 * margin_x);
    const double uy = margin_y + gauss.uniform() * (spec.height - 2.0 * margin_y);
    const double d = 3.5 + 4.5 * gauss.uniform();
    static_points.push_back(unproject(spec.intrinsics, Vec2(ux, uy), d));
  }

  // Assemble tracks: moving bodies first, then background.
  std::vector<Vec3> world0(static_cast<size_t>(N));
  scene.body_of_track.resize(static_cast<size_t>(N));
  Eigen::Index idx = 0;
  for (int b = 0; b < spec.n_bodies; ++b) {
    for (const Vec3& p : bodies[static_cast<size_t>(b)].points) {
      world0[static_cast<size_t>(idx)] = p;
      scene.body_of_track[static_cast<size_t>(idx)] = b + 1;
      ++idx;
    }
  }
  for (const Vec3& p : static_points) {
    world0[static_cast<size_t>(idx)] = p;
    scene.body_of_track[static_cast<size_t>(idx)] = 0;
    ++idx;
  }

  TrackSet& ts = scene.tracks;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ts.x.setConstant(N, T, nan);
  ts.y.setConstant(N, T, nan);
  ts.visibility.setZero(N, T);
  ts.intrinsics = spec.intrinsics;
  ts.width = spec.width;
  ts.height = spec.height;
  scene.gt_depths.setConstant(N, T, nan);

  for (Eigen::Index i = 0; i < N; ++i) {
    const int b = scene.body_of_track[static_cast<size_t>(i)];
    for (int t = 0; t < T; ++t) {
      Vec3 Xw = world0[static_cast<size_t>(i)];
      if (b > 0) {
        Xw = scene.body_trajectories[static_cast<size_t>(b - 1)][static_cast<size_t>(t)] * Xw;
      }
      const Vec3 Xc = scene.camera_trajectory[static_cast<size_t>(t)] * Xw;
      scene.gt_depths(i, t) = Xc.z();
      if (!(Xc.z() > kNearPlane)) continue;
      Vec2 px = project(spec.intrinsics, Xc);
      if (spec.pixel_noise_sigma > 0.0) {
        px.x() += spec.pixel_noise_sigma * gauss();
        px.y() += spec.pixel_noise_sigma * gauss();
      }
      if (px.x() >= 0.0 && px.x() < spec.width && px.y() >= 0.0 && px.y() < spec.height) {
        ts.x(i, t) = px.x();
        ts.y(i, t) = px.y();
        ts.visibility(i, t) = 1;
      }
    }
  }
  ts.validate();
  return scene;
}

namespace {

nlohmann::json se3_to_json(const SE3& X) {
  nlohmann::json arr = nlohmann::json::array();
  const Mat4 m = X.matrix();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) arr.push_back(m(r, c));
  }
  return arr;
}

SE3 se3_from_json(const nlohmann::json& arr) {
  if (!arr.is_array() || arr.size() != 16) throw std::runtime_error("ground truth: bad SE3 entry");
  Mat4 m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = arr[static_cast<size_t>(4 * r + c)].get<double>();
  }
  return SE3::from_matrix(m);
}

}  // namespace

void save_scene_ground_truth(const SyntheticScene& scene, const std::filesystem::path& path) {
  nlohmann::json j;
  j["body_of_track"] = scene.body_of_track;
  nlohmann::json cam = nlohmann::json::array();
  for (const SE3& X : scene.camera_trajectory) cam.push_back(se3_to_json(X));
  j["camera_trajectory"] = cam;
  nlohmann::json bodies = nlohmann::json::array();
  for (const auto& traj : scene.body_trajectories) {
    nlohmann::json one = nlohmann::json::array();
    for (const SE3& X : traj) one.push_back(se3_to_json(X));
    bodies.push_back(one);
  }
  j["body_trajectories"] = bodies;
  nlohmann::json depths = nlohmann::json::array();
  for (Eigen::Index i = 0; i < scene.gt_depths.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index t = 0; t < scene.gt_depths.cols(); ++t) row.push_back(scene.gt_depths(i, t));
    depths.push_back(row);
  }
  j["gt_depths"] = depths;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ground truth file: " + path.string());
  out << j.dump(1) << "\n";
}

SceneGroundTruth load_scene_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ground truth file: " + path.string());
  nlohmann::json j;
  in >> j;
  SceneGroundTruth gt;
  gt.body_of_track = j.at("body_of_track").get<std::vector<int>>();
  for (const auto& e : j.at("camera_trajectory")) gt.camera_trajectory.push_back(se3_from_json(e));
  for (const auto& traj : j.at("body_trajectories")) {
    std::vector<SE3> one;
    for (const auto& e : traj) one.push_back(se3_from_json(e));
    gt.body_trajectories.push_back(std::move(one));
  }
  const auto& depths = j.at("gt_depths");
  const Eigen::Index n = static_cast<Eigen::Index>(depths.size());
  if (n == 0) throw std::runtime_error("ground truth: empty gt_depths");
  const Eigen::Index t = static_cast<Eigen::Index>(depths[0].size());
  gt.gt_depths.resize(n, t);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index f = 0; f < t; ++f) {
      gt.gt_depths(i, f) = depths[static_cast<size_t>(i)][static_cast<size_t>(f)].get<double>();
    }
  }
  return gt;
}

}  // namespace rigidtrack
