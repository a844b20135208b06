#include "posegen/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "posegen/error.hpp"
#include "posegen/image.hpp"

namespace posegen {

SegmentTable SegmentTable::defaults() {
  SegmentTable t;
  // Upper arms, forearms, thighs, shins, shoulder line, hip line, the spine
  // split neck->either hip, and one shoulder-hip diagonal. Indices follow
  // kKeypointNames.
  t.segments = {{
      {2, 3},    // right upper arm
      {5, 6},    // left upper arm
      {3, 4},    // right forearm
      {6, 7},    // left forearm
      {8, 9},    // right thigh
      {11, 12},  // left thigh
      {9, 10},   // right shin
      {12, 13},  // left shin
      {2, 5},    // shoulder to shoulder
      {8, 11},   // hip to hip
      {1, 8},    // neck to right hip
      {1, 11},   // neck to left hip
      {2, 11},   // right shoulder to left hip
  }};
  // The densest set adds one more point per segment, alternating between the
  // quarter positions so neighbouring segments fill opposite halves.
  for (std::size_t i = 0; i < kSegmentCount; ++i)
    t.dense_fraction[i] = (i % 2 == 0) ? 0.25 : 0.75;
  return t;
}

std::size_t descriptor_count_for_level(std::size_t level) {
  switch (level) {
    case 64:
    case 128:
      return kKeypointCount;
    case 256:
    case 512:
      return kKeypointCount + kSegmentCount;
    case 1024:
      return kKeypointCount + 2 * kSegmentCount;
    default:
      throw Error("descriptor_count_for_level: invalid level " +
                  std::to_string(level));
  }
}

DescriptorSet build_descriptors(const KeypointSet& kp, std::size_t level,
                                std::size_t count, const SegmentTable& table) {
  const std::size_t nominal = count == 0 ? descriptor_count_for_level(level)
                                         : count;
  check(nominal == kKeypointCount ||
            nominal == kKeypointCount + kSegmentCount ||
            nominal == kKeypointCount + 2 * kSegmentCount,
        "build_descriptors: descriptor count must be 18, 31 or 44");
  check(kp.height == level && kp.width == level,
        "build_descriptors: keypoints not scaled to level " +
            std::to_string(level));

  DescriptorSet ds;
  ds.level = level;
  ds.window_side = level / 8;
  ds.centers.reserve(nominal);

  for (const auto& p : kp.points)
    if (p.present()) ds.centers.push_back({p.x, p.y});

  auto add_interpolated = [&](double t) {
    for (std::size_t s = 0; s < kSegmentCount; ++s) {
      const auto [a, b] = table.segments[s];
      check(a < kKeypointCount && b < kKeypointCount,
            "build_descriptors: segment joint index out of range");
      const Keypoint& pa = kp.points[a];
      const Keypoint& pb = kp.points[b];
      if (!pa.present() || !pb.present()) continue;
      const double f = t < 0.0 ? table.dense_fraction[s] : t;
      ds.centers.push_back(
          {pa.x + f * (pb.x - pa.x), pa.y + f * (pb.y - pa.y)});
    }
  };

  if (nominal >= kKeypointCount + kSegmentCount) add_interpolated(0.5);
  if (nominal == kKeypointCount + 2 * kSegmentCount) add_interpolated(-1.0);
  return ds;
}

Rect crop_window(double cx, double cy, std::size_t level) {
  check(is_valid_level(level), "crop_window: invalid level");
  const long side = static_cast<long>(level / 8);
  const long max_origin = static_cast<long>(level) - side;
  long x0 = std::lround(cx) - side / 2;
  long y0 = std::lround(cy) - side / 2;
  x0 = std::clamp(x0, 0L, max_origin);
  y0 = std::clamp(y0, 0L, max_origin);
  return Rect{static_cast<std::size_t>(x0), static_cast<std::size_t>(y0),
              static_cast<std::size_t>(side)};
}

std::vector<TensorF> extract_crops(const TensorF& img,
                                   const DescriptorSet& ds) {
  check(img.rank() == 3, "extract_crops: [C,H,W] image expected");
  check(img.dim(1) == ds.level && img.dim(2) == ds.level,
        "extract_crops: image resolution does not match descriptor level");
  const std::size_t C = img.dim(0), L = ds.level, side = ds.window_side;

  std::vector<TensorF> crops;
  crops.reserve(ds.size());
  for (const auto& center : ds.centers) {
    const Rect r = crop_window(center.x, center.y, L);
    TensorF crop({C, side, side});
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t y = 0; y < side; ++y)
        std::memcpy(crop.data() + (c * side + y) * side,
                    img.data() + (c * L + r.y0 + y) * L + r.x0,
                    side * sizeof(float));
    crops.push_back(std::move(crop));
  }
  return crops;
}

}  // namespace posegen
