#pragma once

#include <cstddef>

#include "json.hpp"
#include "posegen/descriptors.hpp"
#include "posegen/tensor.hpp"
#include "posegen/vgg.hpp"

namespace posegen::metrics {

/// Windowed structural similarity. Inputs are [C, H, W] (or [1, C, H, W])
/// images in [-1, 1]; they are remapped to [0, 1] so the standard constants
/// (K1 = 0.01, K2 = 0.03, dynamic range 1) apply. 11x11 Gaussian window with
/// sigma 1.5, valid windows only, per-channel scores averaged. The window
/// shrinks to min(11, H, W) so small crops stay defined.
double ssim(const TensorF& a, const TensorF& b);

/// Five-scale multi-scale SSIM with the canonical weights
/// {0.0448, 0.2856, 0.3001, 0.2363, 0.1333}. Requires min(H, W) >= 176 so
/// the 11-px window fits after four halvings. Odd dimensions drop their last
/// row/column when pooling; contrast terms are clamped at zero before the
/// weighted product.
double ms_ssim(const TensorF& a, const TensorF& b);

/// Arithmetic mean of ssim() over the descriptor crops of both images.
double local_ssim(const TensorF& a, const TensorF& b, const DescriptorSet& ds);

/// Mean over extractor taps of the mean squared difference between
/// channel-L2-normalized activations. Zero for identical inputs; symmetric.
double perceptual_distance(const TensorF& a, const TensorF& b,
                           FeatureExtractor& fx);

struct MetricsReport {
  double ssim = 0.0;
  double ms_ssim = 0.0;
  bool has_ms_ssim = false;  // false below the 176-px MS-SSIM minimum
  double local_ssim = 0.0;
  double perceptual_distance = 0.0;
  std::size_t n_pairs = 0;

  /// All five report keys are always present; ms_ssim is null when the
  /// resolution cannot support five scales.
  nlohmann::json to_json() const;
};

}  // namespace posegen::metrics
