#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "posegen/nn.hpp"
#include "posegen/tensor.hpp"

namespace posegen {

/// Patch discriminator over paired 128x128 crops.
///
/// The input stacks a conditioning crop and a candidate crop along channels
/// ([N, 6, 128, 128]). Six spectrally normalized stride-2 3x3 convolutions
/// (64 -> 128 -> 256 -> 512 -> 1024 -> 2048 channels, leaky ReLU 0.2, no
/// batch norm) reduce 128x128 to 2x2; a spectrally normalized 3x3 head maps
/// to one channel, sigmoid squashes each cell, and 2x2 average pooling
/// yields one probability per pair. One weight-shared instance scores every
/// body-part crop.
class LocalDiscriminator {
 public:
  static constexpr std::size_t kCropSide = 128;
  static constexpr std::size_t kPairChannels = 6;
  static constexpr std::size_t kLadderDepth = 6;

  explicit LocalDiscriminator(std::uint64_t seed);

  static const std::array<std::size_t, kLadderDepth>& ladder_widths();

  /// pairs: [N, 6, 128, 128]. Returns one probability in (0, 1) per pair.
  /// Train mode advances the spectral norm power iteration and caches
  /// activations for backward().
  std::vector<double> forward(const TensorF& pairs, bool train);

  /// Backpropagates d(loss)/d(probability) through the latest train-mode
  /// forward; accumulates parameter gradients and returns the gradient with
  /// respect to the input pairs.
  TensorF backward(const std::vector<double>& dp);

  std::vector<nn::Param*> params();
  std::vector<nn::Buffer*> buffers();
  void set_trainable(bool trainable);

  /// Stage access (exposed for tests).
  nn::SNConv2d& ladder_stage(std::size_t i) { return ladder_.at(i); }
  nn::SNConv2d& head_stage() { return head_; }

  /// Mean of binary cross-entropy against 1 for real and 0 for fake,
  /// averaged over the two terms. A blind 0.5 guess scores ln 2.
  static double d_loss(const std::vector<double>& p_real,
                       const std::vector<double>& p_fake);
  static void d_loss_grads(const std::vector<double>& p_real,
                           const std::vector<double>& p_fake,
                           std::vector<double>& dreal,
                           std::vector<double>& dfake);

  /// Non-saturating generator objective: mean of -ln p over fake pairs.
  static double g_adv(const std::vector<double>& p_fake);
  static std::vector<double> g_adv_grad(const std::vector<double>& p_fake);

 private:
  std::vector<nn::SNConv2d> ladder_;
  nn::SNConv2d head_;
  std::vector<TensorF> acts_;  // post-leaky-ReLU ladder outputs (train mode)
  TensorF sig_;                // sigmoid head output [N, 1, 2, 2]
};

}  // namespace posegen
