#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "posegen/keypoints.hpp"
#include "posegen/tensor.hpp"

namespace posegen {

inline constexpr std::size_t kSegmentCount = 13;

/// The limb/torso segments used to interpolate extra descriptor centers, as
/// (joint a, joint b) index pairs, plus the interpolation parameter each
/// segment contributes to the densest set. Ships as a config default; see
/// docs/keypoint-order.md for the table in joint names.
struct SegmentTable {
  std::array<std::pair<std::size_t, std::size_t>, kSegmentCount> segments;
  std::array<double, kSegmentCount> dense_fraction;

  static SegmentTable defaults();
};

struct DescriptorPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Crop centers at a given resolution. Windows have a fixed side of
/// level / 8; centers whose anchor joints are undetected are dropped, so
/// size() can be below the level's nominal count.
struct DescriptorSet {
  std::vector<DescriptorPoint> centers;
  std::size_t window_side = 0;
  std::size_t level = 0;

  std::size_t size() const { return centers.size(); }
};

/// Square crop window in integer pixel coordinates, fully inside the image.
struct Rect {
  std::size_t x0 = 0;
  std::size_t y0 = 0;
  std::size_t side = 0;
};

/// Nominal descriptor count per resolution: coarse levels use the raw
/// joints, mid levels add segment midpoints, the top level adds one more
/// interpolated point per segment.
std::size_t descriptor_count_for_level(std::size_t level);

/// Builds the descriptor set for keypoints already scaled to level x level.
/// Ordering: raw joints (indices 0..17), then segment midpoints, then the
/// dense interpolated points, each group in table order, skipping entries
/// whose anchor joints are missing. count selects the nominal set size (18,
/// 31 or 44); 0 means the level's scheduled default.
DescriptorSet build_descriptors(const KeypointSet& kp, std::size_t level,
                                std::size_t count = 0,
                                const SegmentTable& table = SegmentTable::defaults());

/// Window of side level/8 centered at (cx, cy): origin = round(center) -
/// side/2 per axis (round half away from zero), then translated - never
/// shrunk - to fit inside [0, level)^2.
Rect crop_window(double cx, double cy, std::size_t level);

/// Copies the window around every descriptor out of a [C, level, level]
/// image; one [C, side, side] tensor per descriptor.
std::vector<TensorF> extract_crops(const TensorF& img, const DescriptorSet& ds);

}  // namespace posegen
