#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "posegen/rng.hpp"
#include "posegen/tensor.hpp"

namespace posegen::nn {

/// A named trainable tensor with its gradient accumulator and optimizer
/// state. Optimizer moments live here so they survive architecture growth:
/// layers carried over to the next resolution keep their Adam history.
struct Param {
  std::string name;
  TensorF value;
  TensorF grad;
  TensorF adam_m;
  TensorF adam_v;
  std::int64_t adam_t = 0;
  bool trainable = true;

  void init_zero_grad() {
    grad = TensorF(value.shape());
    grad.zero();
  }
};

/// A named non-trainable tensor that still belongs in checkpoints
/// (batch-norm running statistics, spectral-norm power-iteration vectors).
struct Buffer {
  std::string name;
  TensorF value;
};

/// 2D convolution with square kernels. Caches its input in train mode so
/// backward() can form weight gradients.
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(std::string name, std::size_t in_ch, std::size_t out_ch,
         std::size_t kernel, std::size_t stride, std::size_t pad, bool bias);

  /// He-normal weight init, zero bias.
  void init_he(Rng& rng);

  TensorF forward(const TensorF& x, bool train);

  /// Accumulates parameter gradients (unless frozen) and returns dL/dx.
  TensorF backward(const TensorF& dy);

  void set_frozen(bool frozen);
  void collect_params(std::vector<Param*>& out);
  void collect_buffers(std::vector<Buffer*>& out) { (void)out; }

  Param& weight() { return w_; }
  Param& bias() { return b_; }
  bool has_bias() const { return has_bias_; }
  std::size_t in_channels() const { return in_ch_; }
  std::size_t out_channels() const { return out_ch_; }
  std::size_t kernel() const { return kernel_; }
  std::size_t stride() const { return stride_; }
  std::size_t padding() const { return pad_; }

  void drop_cache() { cached_x_ = TensorF(); }

 private:
  Param w_;
  Param b_;
  bool has_bias_ = false;
  std::size_t in_ch_ = 0, out_ch_ = 0, kernel_ = 0, stride_ = 0, pad_ = 0;
  TensorF cached_x_;
};

/// Batch normalization over (N, H, W) per channel. Training uses batch
/// statistics and updates running estimates with momentum; eval uses the
/// running estimates. Running variance stores the unbiased estimate while
/// normalization uses the biased one, matching the usual convention.
class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  BatchNorm2d(std::string name, std::size_t channels, double momentum = 0.1,
              double eps = 1e-5);

  TensorF forward(const TensorF& x, bool train);
  TensorF backward(const TensorF& dy);

  void collect_params(std::vector<Param*>& out);
  void collect_buffers(std::vector<Buffer*>& out);

  Param& gamma() { return gamma_; }
  Param& beta() { return beta_; }
  Buffer& running_mean() { return running_mean_; }
  Buffer& running_var() { return running_var_; }

  void drop_cache() {
    cached_xhat_ = TensorF();
    cached_inv_std_.clear();
  }

 private:
  Param gamma_;
  Param beta_;
  Buffer running_mean_;
  Buffer running_var_;
  std::size_t channels_ = 0;
  double momentum_ = 0.1;
  double eps_ = 1e-5;
  TensorF cached_xhat_;
  std::vector<double> cached_inv_std_;
};

/// Convolution whose effective kernel is the stored kernel divided by its
/// largest singular value (spectral normalization). One power iteration per
/// training forward keeps the estimate current; eval reuses the stored
/// left-singular vector without advancing it.
class SNConv2d {
 public:
  SNConv2d() = default;
  SNConv2d(std::string name, std::size_t in_ch, std::size_t out_ch,
           std::size_t kernel, std::size_t stride, std::size_t pad, bool bias);

  void init_he(Rng& rng);

  TensorF forward(const TensorF& x, bool train);
  TensorF backward(const TensorF& dy);

  void collect_params(std::vector<Param*>& out);
  void collect_buffers(std::vector<Buffer*>& out);

  /// Normalized kernel as used by the last forward (exposed for tests).
  const TensorF& normalized_weight() const { return w_sn_; }
  double last_sigma() const { return sigma_; }
  Param& weight_orig() { return w_; }
  Param& bias() { return b_; }
  Buffer& u() { return u_; }

 private:
  void compute_sn(bool power_iterate);

  Param w_;          // unnormalized kernel ("weight_orig")
  Param b_;
  Buffer u_;         // persistent left singular vector estimate (out_ch)
  std::vector<float> v_;  // right singular vector (in_ch*k*k), derived
  TensorF w_sn_;
  double sigma_ = 1.0;
  bool has_bias_ = false;
  std::size_t in_ch_ = 0, out_ch_ = 0, kernel_ = 0, stride_ = 0, pad_ = 0;
  TensorF cached_x_;
};

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 5e-4;
};

/// Adam with decoupled-from-schedule per-parameter step counts. Weight decay
/// is added to the gradient before the moment updates (classic L2 style).
class Adam {
 public:
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

  void step(const std::vector<Param*>& params);
  static void zero_grad(const std::vector<Param*>& params);

  const AdamConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }

 private:
  AdamConfig cfg_;
};

}  // namespace posegen::nn
