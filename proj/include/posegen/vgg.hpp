#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "posegen/nn.hpp"
#include "posegen/tensor.hpp"

namespace posegen {

/// Frozen convolutional feature extractor with the layer geometry of a
/// standard 16-layer classifier up to its ninth convolution. Exposes five
/// taps: the (possibly upsampled) input pixels and the activations after the
/// second convolution of stages 1-4. Weights default to a seeded He-normal
/// draw so builds and tests are hermetic; real pretrained weights can be
/// loaded from a tensor container file.
class FeatureExtractor {
 public:
  static constexpr std::size_t kTapCount = 5;
  /// Inputs smaller than this are nearest-upsampled by an integer factor
  /// before extraction so every tap keeps spatial room.
  static constexpr std::size_t kMinInput = 32;
  static constexpr std::uint64_t kDefaultSeed = 0x504f534547454eULL;

  explicit FeatureExtractor(std::uint64_t seed = kDefaultSeed);

  /// Tap activations for x ([N,3,H,W]). With need_grad, intermediate state
  /// is cached so one subsequent backward() can run against this input.
  std::vector<TensorF> features(const TensorF& x, bool need_grad);

  /// dL/dx from per-tap gradients (same order/shapes as features()).
  /// Requires the previous call to have been features(x, true).
  TensorF backward(const std::vector<TensorF>& tap_grads);

  /// Loads convolution weights/biases from a tensor container file
  /// (docs/file-formats.md); missing tensors are an error.
  void load_weights(const std::filesystem::path& path);

  std::uint64_t seed() const { return seed_; }

 private:
  static constexpr std::size_t kConvCount = 9;

  std::vector<nn::Conv2d> convs_;
  std::uint64_t seed_;

  // Per-forward caches (only populated when need_grad):
  std::vector<TensorF> relu_out_;           // post-activation per conv
  std::vector<Tensor<std::uint8_t>> pool_argmax_;
  std::vector<std::size_t> pool_in_hw_;     // spatial size entering each pool
  std::size_t upsample_factor_ = 1;
  std::size_t in_h_ = 0, in_w_ = 0;
};

}  // namespace posegen
