#include "posegen/vgg.hpp"

#include <string>

#include "posegen/checkpoint.hpp"
#include "posegen/error.hpp"
#include "posegen/ops.hpp"
#include "posegen/rng.hpp"

namespace posegen {

namespace {

struct ConvSpec {
  const char* name;
  std::size_t in, out;
};

// Stages 1-4 of the classic 16-layer geometry, up to the second convolution
// of stage 4. Pools sit after conv1_2, conv2_2 and conv3_3.
constexpr ConvSpec kConvSpecs[] = {
    {"conv1_1", 3, 64},    {"conv1_2", 64, 64},   {"conv2_1", 64, 128},
    {"conv2_2", 128, 128}, {"conv3_1", 128, 256}, {"conv3_2", 256, 256},
    {"conv3_3", 256, 256}, {"conv4_1", 256, 512}, {"conv4_2", 512, 512},
};
constexpr std::size_t kPoolAfter[] = {1, 3, 6};  // conv indices
constexpr std::size_t kTapAfter[] = {1, 3, 5, 8};  // relu1_2/2_2/3_2/4_2

bool pool_follows(std::size_t conv_idx) {
  for (std::size_t p : kPoolAfter)
    if (p == conv_idx) return true;
  return false;
}

bool tap_follows(std::size_t conv_idx) {
  for (std::size_t t : kTapAfter)
    if (t == conv_idx) return true;
  return false;
}

}  // namespace

FeatureExtractor::FeatureExtractor(std::uint64_t seed) : seed_(seed) {
  Rng rng(seed);
  convs_.reserve(kConvCount);
  for (const auto& spec : kConvSpecs) {
    convs_.emplace_back(std::string("vgg.") + spec.name, spec.in, spec.out, 3,
                        1, 1, /*bias=*/true);
    convs_.back().init_he(rng);
    convs_.back().set_frozen(true);  // weights never receive updates
  }
}

std::vector<TensorF> FeatureExtractor::features(const TensorF& x,
                                                bool need_grad) {
  check(x.rank() == 4 && x.dim(1) == 3, "features: [N,3,H,W] expected");
  in_h_ = x.dim(2);
  in_w_ = x.dim(3);
  const std::size_t side = std::min(in_h_, in_w_);
  upsample_factor_ = side >= kMinInput ? 1 : (kMinInput + side - 1) / side;

  relu_out_.clear();
  pool_argmax_.clear();
  pool_in_hw_.clear();
  if (need_grad) {
    relu_out_.resize(kConvCount);
    pool_argmax_.resize(std::size(kPoolAfter));
    pool_in_hw_.resize(std::size(kPoolAfter) * 2);
  }

  TensorF h = upsample_factor_ > 1 ? ops::upsample_nearest(x, upsample_factor_)
                                   : x;
  std::vector<TensorF> taps;
  taps.reserve(kTapCount);
  taps.push_back(h);  // pixel tap

  std::size_t pool_idx = 0;
  for (std::size_t i = 0; i < kConvCount; ++i) {
    h = convs_[i].forward(h, need_grad);
    ops::relu(h);
    if (need_grad) relu_out_[i] = h;
    if (tap_follows(i)) taps.push_back(h);
    if (pool_follows(i)) {
      if (need_grad) {
        pool_in_hw_[pool_idx * 2] = h.dim(2);
        pool_in_hw_[pool_idx * 2 + 1] = h.dim(3);
        h = ops::max_pool2(h, &pool_argmax_[pool_idx]);
      } else {
        h = ops::max_pool2<float>(h, nullptr);
      }
      ++pool_idx;
    }
  }
  check(taps.size() == kTapCount, "features: tap bookkeeping broke");
  return taps;
}

TensorF FeatureExtractor::backward(const std::vector<TensorF>& tap_grads) {
  check(tap_grads.size() == kTapCount, "backward: need one grad per tap");
  check(!relu_out_.empty() && !relu_out_[0].empty(),
        "backward without a need_grad forward");

  // Walk the chain in reverse, injecting each tap gradient where its
  // activation was emitted.
  TensorF d = tap_grads[kTapCount - 1];
  std::size_t next_tap = kTapCount - 2;  // taps 3,2,1 pending; tap 0 last
  std::size_t pool_idx = std::size(kPoolAfter);
  for (std::size_t ri = kConvCount; ri-- > 0;) {
    if (pool_follows(ri)) {
      --pool_idx;
      d = ops::max_pool2_grad(d, pool_argmax_[pool_idx],
                              pool_in_hw_[pool_idx * 2],
                              pool_in_hw_[pool_idx * 2 + 1]);
    }
    if (tap_follows(ri) && ri != kConvCount - 1) {
      d += tap_grads[next_tap];
      --next_tap;
    }
    d = convs_[ri].backward(ops::relu_grad(d, relu_out_[ri]));
  }
  d += tap_grads[0];

  if (upsample_factor_ > 1)
    d = ops::upsample_nearest_grad(d, upsample_factor_);
  return d;
}

void FeatureExtractor::load_weights(const std::filesystem::path& path) {
  const Checkpoint ck = load_checkpoint(path);
  for (auto& conv : convs_) {
    for (nn::Param* p : {&conv.weight(), &conv.bias()}) {
      const TensorF* t = ck.find(p->name);
      check(t != nullptr,
            "extractor weight file " + path.string() + " is missing tensor '" +
                p->name + "'");
      check(t->shape() == p->value.shape(),
            "extractor weight tensor '" + p->name + "' has the wrong shape");
      p->value = *t;
    }
  }
}

}  // namespace posegen
