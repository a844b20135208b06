#include "posegen/autoencoder.hpp"

#include <utility>

#include "posegen/error.hpp"
#include "posegen/heatmap.hpp"
#include "posegen/image.hpp"
#include "posegen/keypoints.hpp"
#include "posegen/ops.hpp"

namespace posegen {
namespace {

constexpr float kLeakySlope = 0.2f;
constexpr std::size_t kBottleneckSpatial = 32;
constexpr std::size_t kBottleneckWidth = 1024;

}  // namespace

std::size_t Autoencoder::encoder_channels(std::size_t spatial) {
  check(spatial >= kBottleneckSpatial && spatial <= 1024,
        "encoder spatial size out of range");
  return 16384 / spatial;
}

std::size_t Autoencoder::decoder_channels(std::size_t spatial) {
  check(spatial >= kBottleneckSpatial && spatial <= 1024,
        "decoder spatial size out of range");
  if (spatial == kBottleneckSpatial) return kBottleneckWidth;
  return 32768 / spatial;
}

Autoencoder::ConvBlock::ConvBlock(const std::string& prefix,
                                  std::size_t spatial_size, std::size_t in_ch,
                                  std::size_t out_ch)
    : conv1(prefix + ".conv1", in_ch, out_ch, 3, 1, 1, true),
      bn1(prefix + ".bn1", out_ch),
      conv2(prefix + ".conv2", out_ch, out_ch, 3, 1, 1, true),
      bn2(prefix + ".bn2", out_ch),
      spatial(spatial_size) {}

void Autoencoder::ConvBlock::init(Rng& rng) {
  conv1.init_he(rng);
  conv2.init_he(rng);
}

TensorF Autoencoder::ConvBlock::forward(const TensorF& x, bool train) {
  TensorF h = conv1.forward(x, train);
  h = bn1.forward(h, train);
  ops::leaky_relu(h, kLeakySlope);
  if (train) act1 = h;
  h = conv2.forward(h, train);
  h = bn2.forward(h, train);
  ops::leaky_relu(h, kLeakySlope);
  if (train) act2 = h;
  return h;
}

TensorF Autoencoder::ConvBlock::backward(const TensorF& d) {
  TensorF g = ops::leaky_relu_grad(d, act2, kLeakySlope);
  g = bn2.backward(g);
  g = conv2.backward(g);
  g = ops::leaky_relu_grad(g, act1, kLeakySlope);
  g = bn1.backward(g);
  return conv1.backward(g);
}

void Autoencoder::ConvBlock::collect_params(std::vector<nn::Param*>& out) {
  conv1.collect_params(out);
  bn1.collect_params(out);
  conv2.collect_params(out);
  bn2.collect_params(out);
}

void Autoencoder::ConvBlock::collect_buffers(std::vector<nn::Buffer*>& out) {
  bn1.collect_buffers(out);
  bn2.collect_buffers(out);
}

Autoencoder::ConvBlock Autoencoder::make_encoder_block(std::size_t spatial) {
  const std::size_t in_ch = encoder_channels(spatial);
  return ConvBlock("enc.s" + std::to_string(spatial), spatial, in_ch,
                   in_ch * 2);
}

Autoencoder::ConvBlock Autoencoder::make_decoder_block(std::size_t spatial) {
  const std::size_t in_ch =
      decoder_channels(spatial / 2) + encoder_channels(spatial);
  return ConvBlock("dec.s" + std::to_string(spatial), spatial, in_ch,
                   decoder_channels(spatial));
}

nn::Conv2d Autoencoder::make_rgb_in(std::size_t level) {
  return nn::Conv2d("rgb_in.s" + std::to_string(level), 3,
                    encoder_channels(level), 1, 1, 0, true);
}

nn::Conv2d Autoencoder::make_rgb_out(std::size_t level) {
  return nn::Conv2d("rgb_out.s" + std::to_string(level),
                    decoder_channels(level), 3, 1, 1, 0, true);
}

std::vector<BlockSpec> Autoencoder::plan(std::size_t level) {
  check(is_valid_level(level), "level must be a power of two in [64, 1024]");
  std::vector<BlockSpec> specs;
  for (std::size_t s = level; s >= 64; s /= 2) {
    specs.push_back({s, encoder_channels(s), encoder_channels(s) * 2,
                     BlockSpec::Position::kEncoder});
  }
  specs.push_back({kBottleneckSpatial,
                   encoder_channels(kBottleneckSpatial) + kKeypointCount,
                   kBottleneckWidth, BlockSpec::Position::kBottleneck});
  for (std::size_t s = 64; s <= level; s *= 2) {
    specs.push_back({s, decoder_channels(s / 2) + encoder_channels(s),
                     decoder_channels(s), BlockSpec::Position::kDecoder});
  }
  return specs;
}

Autoencoder::Autoencoder(std::size_t level, std::uint64_t seed)
    : level_(level) {
  check(is_valid_level(level), "level must be a power of two in [64, 1024]");
  rgb_in_ = make_rgb_in(level);
  for (std::size_t s = level; s >= 64; s /= 2) {
    enc_.push_back(make_encoder_block(s));
  }
  bottleneck_ =
      ConvBlock("bottleneck", kBottleneckSpatial,
                encoder_channels(kBottleneckSpatial) + kKeypointCount,
                kBottleneckWidth);
  for (std::size_t s = 64; s <= level; s *= 2) {
    dec_.push_back(make_decoder_block(s));
  }
  rgb_out_ = make_rgb_out(level);

  Rng rng(seed);
  rgb_in_.init_he(rng);
  for (auto& b : enc_) b.init(rng);
  bottleneck_.init(rng);
  for (auto& b : dec_) b.init(rng);
  rgb_out_.init_he(rng);
}

TensorF Autoencoder::forward(const TensorF& x, const TensorF& pose,
                             bool train) {
  check(x.rank() == 4 && x.dim(1) == 3 && x.dim(2) == level_ &&
            x.dim(3) == level_,
        "autoencoder input must be [N, 3, " + std::to_string(level_) + ", " +
            std::to_string(level_) + "]");
  check(pose.rank() == 4 && pose.dim(0) == x.dim(0) &&
            pose.dim(1) == kKeypointCount && pose.dim(2) == kPoseGrid &&
            pose.dim(3) == kPoseGrid,
        "pose input must be [N, 18, 32, 32]");

  TensorF h = rgb_in_.forward(x, train);
  skip_src_.clear();
  for (auto& b : enc_) {
    skip_src_.push_back(h);
    h = b.forward(h, train);
    h = ops::avg_pool2(h);
  }
  h = ops::concat_channels(h, pose);
  h = bottleneck_.forward(h, train);
  const std::size_t n_blocks = enc_.size();
  for (std::size_t i = 0; i < dec_.size(); ++i) {
    h = ops::upsample_nearest(h, 2);
    h = ops::concat_channels(h, skip_src_[n_blocks - 1 - i]);
    h = dec_[i].forward(h, train);
  }
  h = rgb_out_.forward(h, train);
  ops::tanh_inplace(h);
  if (train) out_tanh_ = h;
  return h;
}

TensorF Autoencoder::backward(const TensorF& dout) {
  check(out_tanh_.size() != 0, "backward requires a prior train forward");
  check(dout.shape() == out_tanh_.shape(),
        "output gradient shape does not match the last forward");

  TensorF d = ops::tanh_grad(dout, out_tanh_);
  d = rgb_out_.backward(d);

  const std::size_t n_blocks = enc_.size();
  std::vector<TensorF> dskip(n_blocks);
  for (std::size_t ri = dec_.size(); ri-- > 0;) {
    d = dec_[ri].backward(d);
    const std::size_t up_ch = decoder_channels(dec_[ri].spatial / 2);
    TensorF d_up, d_skip;
    ops::split_channels(d, up_ch, d_up, d_skip);
    dskip[n_blocks - 1 - ri] = std::move(d_skip);
    d = ops::upsample_nearest_grad(d_up, 2);
  }

  d = bottleneck_.backward(d);
  TensorF d_feat, d_pose;
  ops::split_channels(d, encoder_channels(kBottleneckSpatial), d_feat, d_pose);
  d = std::move(d_feat);  // pose heatmaps are inputs, not parameters

  for (std::size_t ri = enc_.size(); ri-- > 0;) {
    d = ops::avg_pool2_grad(d);
    d = enc_[ri].backward(d);
    d += dskip[ri];
  }
  return rgb_in_.backward(d);
}

void Autoencoder::grow(std::uint64_t seed) {
  check(level_ < 1024, "cannot grow beyond 1024");
  const std::size_t new_level = level_ * 2;

  ConvBlock enc_block = make_encoder_block(new_level);
  ConvBlock dec_block = make_decoder_block(new_level);
  nn::Conv2d rgb_in = make_rgb_in(new_level);
  nn::Conv2d rgb_out = make_rgb_out(new_level);

  Rng rng(Rng::mix(seed, new_level));
  enc_block.init(rng);
  dec_block.init(rng);
  rgb_in.init_he(rng);
  rgb_out.init_he(rng);

  enc_.insert(enc_.begin(), std::move(enc_block));
  dec_.push_back(std::move(dec_block));
  rgb_in_ = std::move(rgb_in);
  rgb_out_ = std::move(rgb_out);
  level_ = new_level;
  skip_src_.clear();
  out_tanh_ = TensorF();
}

std::vector<nn::Param*> Autoencoder::params() {
  std::vector<nn::Param*> out;
  rgb_in_.collect_params(out);
  for (auto& b : enc_) b.collect_params(out);
  bottleneck_.collect_params(out);
  for (auto& b : dec_) b.collect_params(out);
  rgb_out_.collect_params(out);
  return out;
}

std::vector<nn::Buffer*> Autoencoder::buffers() {
  std::vector<nn::Buffer*> out;
  for (auto& b : enc_) b.collect_buffers(out);
  bottleneck_.collect_buffers(out);
  for (auto& b : dec_) b.collect_buffers(out);
  return out;
}

}  // namespace posegen
