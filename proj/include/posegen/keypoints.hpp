#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string_view>

namespace posegen {

inline constexpr std::size_t kKeypointCount = 18;

/// One body joint in image-pixel coordinates. A confidence of 0 (or less)
/// marks the joint as undetected; downstream code must not consume x/y then.
struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  bool present() const { return confidence > 0.0; }
};

/// The 18 joints in the fixed anatomical order used by common pose
/// estimators (see docs/keypoint-order.md), plus the pixel grid the
/// coordinates are expressed in.
struct KeypointSet {
  std::array<Keypoint, kKeypointCount> points{};
  std::size_t height = 0;
  std::size_t width = 0;
};

/// Canonical joint names, index-aligned with KeypointSet::points.
extern const std::array<std::string_view, kKeypointCount> kKeypointNames;

/// Parses a keypoint file: a JSON array of exactly 18 [x, y, confidence]
/// triples. The caller supplies the pixel grid (usually the paired image's
/// native size) since the file format does not carry it. Present joints are
/// validated to lie inside the grid.
KeypointSet load_keypoints(const std::filesystem::path& path,
                           std::size_t height, std::size_t width);

/// Rescales coordinates onto a new grid (per-axis factors target/source).
/// Confidences are preserved; missing joints stay missing.
KeypointSet scale_keypoints(const KeypointSet& kp, std::size_t target_h,
                            std::size_t target_w);

}  // namespace posegen
