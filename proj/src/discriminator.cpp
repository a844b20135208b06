#include "posegen/discriminator.hpp"

#include <cmath>
#include <string>

#include "posegen/error.hpp"
#include "posegen/ops.hpp"

namespace posegen {
namespace {

constexpr float kLeakySlope = 0.2f;
constexpr double kProbEps = 1e-7;

double clamp_prob(double p) {
  if (p < kProbEps) return kProbEps;
  if (p > 1.0 - kProbEps) return 1.0 - kProbEps;
  return p;
}

}  // namespace

const std::array<std::size_t, LocalDiscriminator::kLadderDepth>&
LocalDiscriminator::ladder_widths() {
  static const std::array<std::size_t, kLadderDepth> widths = {
      64, 128, 256, 512, 1024, 2048};
  return widths;
}

LocalDiscriminator::LocalDiscriminator(std::uint64_t seed)
    : head_("disc.head", ladder_widths().back(), 1, 3, 1, 1, true) {
  std::size_t in_ch = kPairChannels;
  for (std::size_t i = 0; i < kLadderDepth; ++i) {
    const std::size_t out_ch = ladder_widths()[i];
    ladder_.emplace_back("disc.conv" + std::to_string(i + 1), in_ch, out_ch, 3,
                         2, 1, true);
    in_ch = out_ch;
  }
  Rng rng(seed);
  for (auto& c : ladder_) c.init_he(rng);
  head_.init_he(rng);
}

std::vector<double> LocalDiscriminator::forward(const TensorF& pairs,
                                                bool train) {
  check(pairs.rank() == 4 && pairs.dim(1) == kPairChannels &&
            pairs.dim(2) == kCropSide && pairs.dim(3) == kCropSide,
        "discriminator input must be [N, 6, 128, 128] crop pairs");
  const std::size_t n = pairs.dim(0);
  check(n > 0, "discriminator batch must be non-empty");

  acts_.clear();
  TensorF h = pairs;
  for (auto& c : ladder_) {
    h = c.forward(h, train);
    ops::leaky_relu(h, kLeakySlope);
    if (train) acts_.push_back(h);
  }
  h = head_.forward(h, train);
  ops::sigmoid(h);
  if (train) sig_ = h;

  std::vector<double> probs(n);
  const std::size_t cells = h.dim(2) * h.dim(3);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cells; ++j) {
      acc += h.storage()[i * cells + j];
    }
    probs[i] = acc / static_cast<double>(cells);
  }
  return probs;
}

TensorF LocalDiscriminator::backward(const std::vector<double>& dp) {
  check(sig_.size() != 0, "backward requires a prior train forward");
  const std::size_t n = sig_.dim(0);
  check(dp.size() == n, "probability gradient count does not match batch");
  const std::size_t cells = sig_.dim(2) * sig_.dim(3);

  TensorF dz(sig_.shape());
  for (std::size_t i = 0; i < n; ++i) {
    const float dmean = static_cast<float>(dp[i] / static_cast<double>(cells));
    for (std::size_t j = 0; j < cells; ++j) {
      const float s = sig_.storage()[i * cells + j];
      dz.storage()[i * cells + j] = dmean * s * (1.0f - s);
    }
  }

  TensorF d = head_.backward(dz);
  for (std::size_t ri = ladder_.size(); ri-- > 0;) {
    d = ops::leaky_relu_grad(d, acts_[ri], kLeakySlope);
    d = ladder_[ri].backward(d);
  }
  return d;
}

std::vector<nn::Param*> LocalDiscriminator::params() {
  std::vector<nn::Param*> out;
  for (auto& c : ladder_) c.collect_params(out);
  head_.collect_params(out);
  return out;
}

std::vector<nn::Buffer*> LocalDiscriminator::buffers() {
  std::vector<nn::Buffer*> out;
  for (auto& c : ladder_) c.collect_buffers(out);
  head_.collect_buffers(out);
  return out;
}

void LocalDiscriminator::set_trainable(bool trainable) {
  for (nn::Param* p : params()) p->trainable = trainable;
}

double LocalDiscriminator::d_loss(const std::vector<double>& p_real,
                                  const std::vector<double>& p_fake) {
  check(!p_real.empty() && p_real.size() == p_fake.size(),
        "real/fake probability batches must be non-empty and equal-sized");
  double real_term = 0.0, fake_term = 0.0;
  for (double p : p_real) real_term += -std::log(clamp_prob(p));
  for (double p : p_fake) fake_term += -std::log(1.0 - clamp_prob(p));
  const double n = static_cast<double>(p_real.size());
  return 0.5 * (real_term / n + fake_term / n);
}

void LocalDiscriminator::d_loss_grads(const std::vector<double>& p_real,
                                      const std::vector<double>& p_fake,
                                      std::vector<double>& dreal,
                                      std::vector<double>& dfake) {
  check(!p_real.empty() && p_real.size() == p_fake.size(),
        "real/fake probability batches must be non-empty and equal-sized");
  const double n = static_cast<double>(p_real.size());
  dreal.resize(p_real.size());
  dfake.resize(p_fake.size());
  for (std::size_t i = 0; i < p_real.size(); ++i) {
    dreal[i] = -0.5 / (n * clamp_prob(p_real[i]));
    dfake[i] = 0.5 / (n * (1.0 - clamp_prob(p_fake[i])));
  }
}

double LocalDiscriminator::g_adv(const std::vector<double>& p_fake) {
  check(!p_fake.empty(), "fake probability batch must be non-empty");
  double acc = 0.0;
  for (double p : p_fake) acc += -std::log(clamp_prob(p));
  return acc / static_cast<double>(p_fake.size());
}

std::vector<double> LocalDiscriminator::g_adv_grad(
    const std::vector<double>& p_fake) {
  check(!p_fake.empty(), "fake probability batch must be non-empty");
  const double n = static_cast<double>(p_fake.size());
  std::vector<double> grad(p_fake.size());
  for (std::size_t i = 0; i < p_fake.size(); ++i) {
    grad[i] = -1.0 / (n * clamp_prob(p_fake[i]));
  }
  return grad;
}

}  // namespace posegen
