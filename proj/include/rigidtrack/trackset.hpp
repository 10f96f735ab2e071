// Point-track data model and file I/O.
//
// Text format, one file per sequence:
//   line 1:  RTRK 1
//   line 2:  N T width height fx fy cx cy
//   then N*T lines:  i t x y v      (v in {0,1}; invisible rows may be nan nan)
//
// Binary variant: magic "RTRKB1", little-endian u64 N,T,width,height,
// f64 fx,fy,cx,cy, then N*T*2 float32 positions (track-major, frame inner,
// x then y), then N*T visibility bytes.

#pragma once

#include "rigidtrack/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>

namespace rigidtrack {

/// N point tracks over T frames, pixel coordinates, per-frame visibility.
/// Invisible entries carry (NaN, NaN) so accidental use surfaces immediately.
struct TrackSet {
  Eigen::MatrixXd x;  // N x T
  Eigen::MatrixXd y;  // N x T
  Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic> visibility;  // N x T
  Intrinsics intrinsics;
  int width = 0;
  int height = 0;

  Eigen::Index track_count() const { return x.rows(); }
  Eigen::Index frame_count() const { return x.cols(); }
  bool visible(Eigen::Index i, Eigen::Index t) const { return visibility(i, t) != 0; }
  Vec2 position(Eigen::Index i, Eigen::Index t) const { return Vec2(x(i, t), y(i, t)); }

  /// Throws on invariant violations (N >= 4, T >= 2, visible points in-bounds,
  /// positive focal lengths).
  void validate() const;

  /// Stable content hash (positions, visibility, header). Used to seed
  /// RANSAC so masking is reproducible for a given track set.
  uint64_t content_hash() const;
};

enum class TrackFileFormat { Text, Binary };

TrackSet load_tracks(const std::filesystem::path& path);
void save_tracks(const TrackSet& tracks, const std::filesystem::path& path,
                 TrackFileFormat format = TrackFileFormat::Text);

}  // namespace rigidtrack
