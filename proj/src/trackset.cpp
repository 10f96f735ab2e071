#include "rigidtrack/trackset.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace rigidtrack {

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, size_t line, const std::string& what) {
  throw std::runtime_error("parse error in " + path.string() + ":" + std::to_string(line) + ": " + what);
}

void hash_bytes(uint64_t& h, const void* data, size_t n) {
  // FNV-1a.
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

}  // namespace

void TrackSet::validate() const {
  const Eigen::Index n = track_count();
  const Eigen::Index t = frame_count();
  if (n < 4 || t < 2) {
    throw std::invalid_argument("track set requires N >= 4 and T >= 2, got N=" +
                                std::to_string(n) + " T=" + std::to_string(t));
  }
  if (y.rows() != n || y.cols() != t || visibility.rows() != n || visibility.cols() != t) {
    throw std::invalid_argument("track set field shapes disagree");
  }
  if (!(intrinsics.fx > 0.0) || !(intrinsics.fy > 0.0)) {
    throw std::invalid_argument("track set intrinsics must have positive focal lengths");
  }
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("track set image size must be positive");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index f = 0; f < t; ++f) {
      if (!visible(i, f)) continue;
      const double px = x(i, f), py = y(i, f);
      if (!std::isfinite(px) || !std::isfinite(py) ||
          px < 0.0 || px >= width || py < 0.0 || py >= height) {
        throw std::invalid_argument("visible point out of bounds at track " + std::to_string(i) +
                                    " frame " + std::to_string(f));
      }
    }
  }
}

uint64_t TrackSet::content_hash() const {
  uint64_t h = 1469598103934665603ULL;
  const int64_t n = track_count(), t = frame_count();
  hash_bytes(h, &n, sizeof(n));
  hash_bytes(h, &t, sizeof(t));
  hash_bytes(h, &width, sizeof(width));
  hash_bytes(h, &height, sizeof(height));
  hash_bytes(h, &intrinsics.fx, sizeof(double));
  hash_bytes(h, &intrinsics.fy, sizeof(double));
  hash_bytes(h, &intrinsics.cx, sizeof(double));
  hash_bytes(h, &intrinsics.cy, sizeof(double));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      if (visible(i, f)) {
        hash_bytes(h, &x(i, f), sizeof(double));
        hash_bytes(h, &y(i, f), sizeof(double));
      }
      hash_bytes(h, &visibility(i, f), 1);
    }
  }
  return h;
}

namespace {

TrackSet load_tracks_text(const std::filesystem::path& path, std::ifstream& in) {
  std::string line;
  size_t line_no = 0;

  if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
  ++line_no;
  if (line != "RTRK 1") parse_fail(path, line_no, "bad magic, expected 'RTRK 1'");

  if (!std::getline(in, line)) parse_fail(path, 2, "missing header line");
  ++line_no;
  std::istringstream hdr(line);
  long long n = -1, t = -1;
  double width = 0, height = 0;
  TrackSet ts;
  if (!(hdr >> n >> t >> width >> height >> ts.intrinsics.fx >> ts.intrinsics.fy >>
        ts.intrinsics.cx >> ts.intrinsics.cy)) {
    parse_fail(path, line_no, "header needs 'N T width height fx fy cx cy'");
  }
  if (n <= 0 || t <= 0) parse_fail(path, line_no, "N and T must be positive");
  ts.width = static_cast<int>(width);
  ts.height = static_cast<int>(height);

  const Eigen::Index N = static_cast<Eigen::Index>(n);
  const Eigen::Index T = static_cast<Eigen::Index>(t);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ts.x.setConstant(N, T, nan);
  ts.y.setConstant(N, T, nan);
  ts.visibility.setZero(N, T);
  Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic> seen =
      Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(N, T);

  long long rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    long long i = -1, f = -1;
    std::string sx, sy;
    int v = -1;
    if (!(row >> i >> f >> sx >> sy >> v)) parse_fail(path, line_no, "row needs 'i t x y v'");
    if (i < 0 || i >= n || f < 0 || f >= t) parse_fail(path, line_no, "track/frame index out of range");
    if (v != 0 && v != 1) parse_fail(path, line_no, "visibility must be 0 or 1");
    if (seen(i, f)) parse_fail(path, line_no, "duplicate row for track " + std::to_string(i) +
                                              " frame " + std::to_string(f));
    seen(i, f) = 1;
    try {
      ts.x(i, f) = std::stod(sx);
      ts.y(i, f) = std::stod(sy);
    } catch (const std::exception&) {
      parse_fail(path, line_no, "bad coordinate value");
    }
    ts.visibility(i, f) = static_cast<uint8_t>(v);
    ++rows;
  }
  if (rows != n * t) {
    parse_fail(path, line_no + 1, "declared N*T = " + std::to_string(n * t) + " rows but file has " +
                                  std::to_string(rows));
  }
  return ts;
}

template <typename T>
T read_le(std::ifstream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw std::runtime_error("parse error in " + path.string() + ": truncated binary file");
  }
  return v;
}

TrackSet load_tracks_binary(const std::filesystem::path& path, std::ifstream& in) {
  char magic[6];
  if (!in.read(magic, 6) || std::memcmp(magic, "RTRKB1", 6) != 0) {
    throw std::runtime_error("parse error in " + path.string() + ": bad binary magic");
  }
  const auto n = read_le<uint64_t>(in, path);
  const auto t = read_le<uint64_t>(in, path);
  const auto width = read_le<uint64_t>(in, path);
  const auto height = read_le<uint64_t>(in, path);
  TrackSet ts;
  ts.intrinsics.fx = read_le<double>(in, path);
  ts.intrinsics.fy = read_le<double>(in, path);
  ts.intrinsics.cx = read_le<double>(in, path);
  ts.intrinsics.cy = read_le<double>(in, path);
  if (n == 0 || t == 0 || n > (1ULL << 32) || t > (1ULL << 32)) {
    throw std::runtime_error("parse error in " + path.string() + ": bad binary header counts");
  }
  ts.width = static_cast<int>(width);
  ts.height = static_cast<int>(height);
  const Eigen::Index N = static_cast<Eigen::Index>(n);
  const Eigen::Index T = static_cast<Eigen::Index>(t);
  ts.x.resize(N, T);
  ts.y.resize(N, T);
  ts.visibility.resize(N, T);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index f = 0; f < T; ++f) {
      ts.x(i, f) = static_cast<double>(read_le<float>(in, path));
      ts.y(i, f) = static_cast<double>(read_le<float>(in, path));
    }
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index f = 0; f < T; ++f) {
      ts.visibility(i, f) = read_le<uint8_t>(in, path);
    }
  }
  return ts;
}

}  // namespace

TrackSet load_tracks(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open tracks file: " + path.string());
  }
  char probe[6] = {};
  in.read(probe, 6);
  in.seekg(0);
  TrackSet ts = (std::memcmp(probe, "RTRKB1", 6) == 0) ? load_tracks_binary(path, in)
                                                       : load_tracks_text(path, in);
  ts.validate();
  return ts;
}

void save_tracks(const TrackSet& tracks, const std::filesystem::path& path, TrackFileFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write tracks file: " + path.string());
  }
  const Eigen::Index N = tracks.track_count();
  const Eigen::Index T = tracks.frame_count();

  if (format == TrackFileFormat::Text) {
    char buf[128];
    out << "RTRK 1\n";
    std::snprintf(buf, sizeof(buf), "%lld %lld %d %d %.17g %.17g %.17g %.17g\n",
                  static_cast<long long>(N), static_cast<long long>(T), tracks.width, tracks.height,
                  tracks.intrinsics.fx, tracks.intrinsics.fy, tracks.intrinsics.cx,
                  tracks.intrinsics.cy);
    out << buf;
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index t = 0; t < T; ++t) {
        std::snprintf(buf, sizeof(buf), "%lld %lld %.17g %.17g %d\n", static_cast<long long>(i),
                      static_cast<long long>(t), tracks.x(i, t), tracks.y(i, t),
                      tracks.visible(i, t) ? 1 : 0);
        out << buf;
      }
    }
  } else {
    auto write = [&out](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
    out.write("RTRKB1", 6);
    write(static_cast<uint64_t>(N));
    write(static_cast<uint64_t>(T));
    write(static_cast<uint64_t>(tracks.width));
    write(static_cast<uint64_t>(tracks.height));
    write(tracks.intrinsics.fx);
    write(tracks.intrinsics.fy);
    write(tracks.intrinsics.cx);
    write(tracks.intrinsics.cy);
    // float32 storage: clamp visible points so rounding cannot push them
    // outside [0, width) x [0, height).
    const float xmax = std::nextafterf(static_cast<float>(tracks.width), 0.0f);
    const float ymax = std::nextafterf(static_cast<float>(tracks.height), 0.0f);
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index t = 0; t < T; ++t) {
        float fx = static_cast<float>(tracks.x(i, t));
        float fy = static_cast<float>(tracks.y(i, t));
        if (tracks.visible(i, t)) {
          fx = std::min(std::max(fx, 0.0f), xmax);
          fy = std::min(std::max(fy, 0.0f), ymax);
        }
        write(fx);
        write(fy);
      }
    }
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index t = 0; t < T; ++t) {
        write(static_cast<uint8_t>(tracks.visible(i, t) ? 1 : 0));
      }
    }
  }
  if (!out) {
    throw std::runtime_error("I/O failure writing " + path.string());
  }
}

}  // namespace rigidtrack
