#pragma once

#include <cstdint>
#include <string_view>

#include "posegen/descriptors.hpp"
#include "posegen/tensor.hpp"
#include "posegen/vgg.hpp"

namespace posegen {

/// Distance applied per feature tap. Training uses the squared form for the
/// first half of each level's iteration budget and the absolute form after.
enum class Criterion { kSquared, kAbsolute };

std::string_view criterion_name(Criterion c);  // "l2" / "l1" (log labels)

/// Criterion for a 0-based step within a level of `total` iterations; the
/// switch happens at floor(total/2), second form inclusive.
Criterion criterion_for_step(std::uint64_t step, std::uint64_t total);

/// Feature-space reconstruction losses over extractor taps. All entry
/// points take single samples ([1, 3, H, W]); batch averaging is the
/// trainer's job. When a gradient pointer is supplied, dLoss/dOut is
/// accumulated into it (shape of `out`).
class PerceptualLoss {
 public:
  explicit PerceptualLoss(FeatureExtractor& fx) : fx_(fx) {}

  /// Sum over taps of the criterion between feature maps of the two images.
  double global_loss(const TensorF& gt, const TensorF& out, Criterion c,
                     TensorF* dout = nullptr);

  /// Sum over descriptors of the per-crop tap sum.
  double local_loss(const TensorF& gt, const TensorF& out,
                    const DescriptorSet& ds, Criterion c,
                    TensorF* dout = nullptr);

  /// global + local with configurable (default unit) weights.
  double total_loss(const TensorF& gt, const TensorF& out,
                    const DescriptorSet& ds, Criterion c,
                    TensorF* dout = nullptr, double global_weight = 1.0,
                    double local_weight = 1.0);

 private:
  double pair_loss(const TensorF& gt_img, const TensorF& out_img, Criterion c,
                   TensorF* dimg);

  FeatureExtractor& fx_;
};

}  // namespace posegen
