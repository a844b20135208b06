#include "posegen/heatmap.hpp"

#include <cmath>

#include "posegen/error.hpp"

namespace posegen {

TensorF render_heatmaps(const KeypointSet& kp, std::size_t grid_h,
                        std::size_t grid_w, double sigma) {
  check(sigma > 0.0, "render_heatmaps: sigma must be positive");
  check(grid_h > 0 && grid_w > 0, "render_heatmaps: empty grid");
  check(kp.height == grid_h && kp.width == grid_w,
        "render_heatmaps: keypoints not scaled to the requested grid");

  TensorF stack({kKeypointCount, grid_h, grid_w});
  const double denom = 2.0 * sigma * sigma;
  for (std::size_t k = 0; k < kKeypointCount; ++k) {
    const Keypoint& p = kp.points[k];
    if (!p.present()) continue;  // channel stays zero
    float* map = stack.data() + k * grid_h * grid_w;
    for (std::size_t y = 0; y < grid_h; ++y)
      for (std::size_t x = 0; x < grid_w; ++x) {
        const double dx = static_cast<double>(x) - p.x;
        const double dy = static_cast<double>(y) - p.y;
        map[y * grid_w + x] =
            static_cast<float>(std::exp(-(dx * dx + dy * dy) / denom));
      }
  }
  return stack;
}

KeypointSet heatmap_argmax(const TensorF& stack) {
  check(stack.rank() == 3 && stack.dim(0) == kKeypointCount,
        "heatmap_argmax: [18,H,W] stack expected");
  const std::size_t H = stack.dim(1), W = stack.dim(2);

  KeypointSet kp;
  kp.height = H;
  kp.width = W;
  for (std::size_t k = 0; k < kKeypointCount; ++k) {
    const float* map = stack.data() + k * H * W;
    float best = 0.0f;
    std::size_t best_idx = 0;
    bool any = false;
    for (std::size_t i = 0; i < H * W; ++i)
      if (map[i] > best) {
        best = map[i];
        best_idx = i;
        any = true;
      }
    Keypoint& p = kp.points[k];
    if (!any) continue;  // all-zero channel: joint missing
    p.x = static_cast<double>(best_idx % W);
    p.y = static_cast<double>(best_idx / W);
    p.confidence = 1.0;
  }
  return kp;
}

}  // namespace posegen
