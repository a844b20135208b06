#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "posegen/nn.hpp"
#include "posegen/tensor.hpp"

namespace posegen {

/// One (conv 3x3 -> batch norm -> leaky ReLU 0.2) x 2 block description;
/// exposed so tests can check the architecture plan without instantiating
/// parameters.
struct BlockSpec {
  enum class Position { kEncoder, kBottleneck, kDecoder };
  std::size_t spatial = 0;       // resolution the convs operate at
  std::size_t in_channels = 0;   // first conv input
  std::size_t out_channels = 0;  // block output
  Position position = Position::kEncoder;
};

/// Skip-connected autoencoder with pose injection at a 32x32 bottleneck.
///
/// The encoder runs double-conv blocks at each spatial size from the current
/// level down to 64, average-pooling between them; feature width at spatial
/// size S is 16384/S (so 512 at the bottleneck). The 18 pose channels are
/// concatenated onto the deepest features and mixed by a 530 -> 1024
/// bottleneck block. The decoder mirrors the ladder at twice the width
/// (32768/S), nearest-upsampling and concatenating the encoder block input
/// at the same spatial size as a skip connection. 1x1 projections map RGB
/// in and out; the output head is tanh, pinning values to [-1, 1].
///
/// grow() doubles the resolution by adding one outermost encoder/decoder
/// block pair (with its skip connection) and replacing the RGB projections;
/// every retained parameter keeps its exact bits, and there is no blending
/// path between old and new layers.
class Autoencoder {
 public:
  Autoencoder(std::size_t level, std::uint64_t seed);

  std::size_t level() const { return level_; }

  /// Feature widths along the two paths.
  static std::size_t encoder_channels(std::size_t spatial);
  static std::size_t decoder_channels(std::size_t spatial);

  /// Architecture plan at a level: encoder blocks outermost-first, then the
  /// bottleneck, then decoder blocks innermost-first.
  static std::vector<BlockSpec> plan(std::size_t level);

  /// x: [N, 3, level, level]; pose: [N, 18, 32, 32]. Output matches x's
  /// shape with values in [-1, 1].
  TensorF forward(const TensorF& x, const TensorF& pose, bool train);

  /// Backpropagates through the most recent train-mode forward, accumulating
  /// parameter gradients. Returns dLoss/dx.
  TensorF backward(const TensorF& dout);

  void grow(std::uint64_t seed);

  /// Stable-ordered parameter/buffer views; re-collect after grow() since
  /// growth reallocates block storage.
  std::vector<nn::Param*> params();
  std::vector<nn::Buffer*> buffers();

 private:
  struct ConvBlock {
    nn::Conv2d conv1;
    nn::BatchNorm2d bn1;
    nn::Conv2d conv2;
    nn::BatchNorm2d bn2;
    std::size_t spatial = 0;
    TensorF act1, act2;  // cached post-activation outputs (train mode)

    ConvBlock() = default;
    ConvBlock(const std::string& prefix, std::size_t spatial_size,
              std::size_t in_ch, std::size_t out_ch);
    void init(Rng& rng);
    TensorF forward(const TensorF& x, bool train);
    TensorF backward(const TensorF& d);
    void collect_params(std::vector<nn::Param*>& out);
    void collect_buffers(std::vector<nn::Buffer*>& out);
  };

  static ConvBlock make_encoder_block(std::size_t spatial);
  static ConvBlock make_decoder_block(std::size_t spatial);
  static nn::Conv2d make_rgb_in(std::size_t level);
  static nn::Conv2d make_rgb_out(std::size_t level);

  std::size_t level_ = 0;
  nn::Conv2d rgb_in_, rgb_out_;
  std::vector<ConvBlock> enc_;  // outermost (spatial == level_) first
  ConvBlock bottleneck_;
  std::vector<ConvBlock> dec_;  // innermost (spatial == 64) first

  // Forward caches.
  std::vector<TensorF> skip_src_;  // encoder block inputs, aligned with enc_
  TensorF out_tanh_;
};

}  // namespace posegen
