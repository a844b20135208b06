#pragma once

#include <cstddef>

#include "posegen/keypoints.hpp"
#include "posegen/tensor.hpp"

namespace posegen {

/// Default Gaussian spread for pose maps, in grid pixels.
inline constexpr double kDefaultSigma = 3.2;

/// Side of the bottleneck grid where pose maps are injected.
inline constexpr std::size_t kPoseGrid = 32;

/// Renders one Gaussian map per joint: maps[k][y][x] =
/// exp(-((x - u_x)^2 + (y - u_y)^2) / (2 sigma^2)) for present joints,
/// an all-zero channel for missing ones. The keypoints must already be
/// scaled to the requested grid. Returns [18, grid_h, grid_w].
TensorF render_heatmaps(const KeypointSet& kp, std::size_t grid_h,
                        std::size_t grid_w, double sigma = kDefaultSigma);

/// Recovers keypoints from a heatmap stack by per-channel argmax (first
/// maximum in row-major order wins). All-zero channels yield missing joints.
/// The inverse of render_heatmaps on integer coordinates; used as an oracle.
KeypointSet heatmap_argmax(const TensorF& stack);

}  // namespace posegen
