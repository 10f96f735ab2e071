// Static/dynamic track separation from two-view epipolar geometry:
// RANSAC over normalized 8-point solves, thresholded Sampson distance.

#pragma once

#include "rigidtrack/trackset.hpp"

#include <vector>

namespace rigidtrack {

constexpr double kDefaultSampsonThresholdPx2 = 2.0;

/// First-order geometric error of the correspondence p0 -> p1 under the
/// fundamental matrix F (all in pixel coordinates), in pixels^2.
double sampson_distance(const Mat3& F, const Vec2& p0, const Vec2& p1);

/// Tracks consistent with a single epipolar geometry between frames t and
/// t+1 (camera motion only). Entry is 1 for tracks visible in both frames
/// whose Sampson distance to the RANSAC consensus model is below threshold.
/// Throws "underdetermined epipolar fit" with fewer than 8 joint-visible
/// tracks.
std::vector<uint8_t> sampson_static_mask(const TrackSet& tracks, Eigen::Index t,
                                         double threshold_px2 = kDefaultSampsonThresholdPx2);

/// Overrides soft rigidity weights with full rigidity between tracks that the
/// epipolar mask marked static: output[j] = 1 when both the query track and j
/// are masked static, soft[j] otherwise.
Eigen::VectorXd merge_static_override(const Eigen::VectorXd& soft,
                                      const std::vector<uint8_t>& static_mask,
                                      Eigen::Index query);

}  // namespace rigidtrack
