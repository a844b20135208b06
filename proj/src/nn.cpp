#include "posegen/nn.hpp"

#include <algorithm>
#include <cmath>

#include "posegen/error.hpp"
#include "posegen/ops.hpp"

namespace posegen::nn {

namespace {

void accumulate(Param& p, const TensorF& g) {
  if (p.grad.empty()) p.init_zero_grad();
  p.grad += g;
}

/// L2-normalizes v in place; returns the pre-normalization norm.
double normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  const double norm = std::sqrt(s);
  const double inv = 1.0 / std::max(norm, 1e-12);
  for (double& x : v) x *= inv;
  return norm;
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv2d
// ---------------------------------------------------------------------------

Conv2d::Conv2d(std::string name, std::size_t in_ch, std::size_t out_ch,
               std::size_t kernel, std::size_t stride, std::size_t pad,
               bool bias)
    : has_bias_(bias),
      in_ch_(in_ch),
      out_ch_(out_ch),
      kernel_(kernel),
      stride_(stride),
      pad_(pad) {
  w_.name = name + ".weight";
  w_.value = TensorF({out_ch, in_ch, kernel, kernel});
  if (bias) {
    b_.name = name + ".bias";
    b_.value = TensorF({out_ch});
  }
}

void Conv2d::init_he(Rng& rng) {
  const double std = std::sqrt(2.0 / static_cast<double>(in_ch_ * kernel_ * kernel_));
  for (std::size_t i = 0; i < w_.value.size(); ++i)
    w_.value[i] = static_cast<float>(rng.normal() * std);
  if (has_bias_) b_.value.zero();
}

TensorF Conv2d::forward(const TensorF& x, bool train) {
  if (train) cached_x_ = x;
  return ops::conv2d(x, w_.value, has_bias_ ? &b_.value : nullptr, stride_,
                     pad_);
}

TensorF Conv2d::backward(const TensorF& dy) {
  check(!cached_x_.empty(), "Conv2d::backward without train-mode forward");
  if (w_.trainable) {
    accumulate(w_, ops::conv2d_weight_grad(dy, cached_x_, stride_, pad_,
                                           kernel_, kernel_));
    if (has_bias_) accumulate(b_, ops::conv2d_bias_grad(dy));
  }
  return ops::conv2d_input_grad(dy, w_.value, stride_, pad_, cached_x_.dim(2),
                                cached_x_.dim(3));
}

void Conv2d::set_frozen(bool frozen) {
  w_.trainable = !frozen;
  b_.trainable = !frozen;
}

void Conv2d::collect_params(std::vector<Param*>& out) {
  out.push_back(&w_);
  if (has_bias_) out.push_back(&b_);
}

// ---------------------------------------------------------------------------
// BatchNorm2d
// ---------------------------------------------------------------------------

BatchNorm2d::BatchNorm2d(std::string name, std::size_t channels,
                         double momentum, double eps)
    : channels_(channels), momentum_(momentum), eps_(eps) {
  gamma_.name = name + ".weight";
  gamma_.value = TensorF({channels});
  gamma_.value.fill(1.0f);
  beta_.name = name + ".bias";
  beta_.value = TensorF({channels});
  running_mean_.name = name + ".running_mean";
  running_mean_.value = TensorF({channels});
  running_var_.name = name + ".running_var";
  running_var_.value = TensorF({channels});
  running_var_.value.fill(1.0f);
}

TensorF BatchNorm2d::forward(const TensorF& x, bool train) {
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  check(C == channels_, "BatchNorm2d: channel mismatch");
  const std::size_t hw = H * W;
  const std::size_t m = N * hw;

  TensorF y(x.shape());
  if (train) {
    cached_xhat_ = TensorF(x.shape());
    cached_inv_std_.assign(C, 0.0);
  }

  for (std::size_t c = 0; c < C; ++c) {
    double mu, var;
    if (train) {
      double s = 0.0, s2 = 0.0;
      for (std::size_t n = 0; n < N; ++n) {
        const float* p = x.data() + (n * C + c) * hw;
        for (std::size_t i = 0; i < hw; ++i) {
          const double v = p[i];
          s += v;
          s2 += v * v;
        }
      }
      mu = s / static_cast<double>(m);
      var = s2 / static_cast<double>(m) - mu * mu;
      var = std::max(var, 0.0);
      // Running estimates track the unbiased variance.
      const double unbiased =
          m > 1 ? var * static_cast<double>(m) / static_cast<double>(m - 1)
                : var;
      running_mean_.value[c] = static_cast<float>(
          (1.0 - momentum_) * running_mean_.value[c] + momentum_ * mu);
      running_var_.value[c] = static_cast<float>(
          (1.0 - momentum_) * running_var_.value[c] + momentum_ * unbiased);
    } else {
      mu = running_mean_.value[c];
      var = running_var_.value[c];
    }
    const double inv_std = 1.0 / std::sqrt(var + eps_);
    if (train) cached_inv_std_[c] = inv_std;
    const float g = gamma_.value[c], b = beta_.value[c];
    for (std::size_t n = 0; n < N; ++n) {
      const float* p = x.data() + (n * C + c) * hw;
      float* q = y.data() + (n * C + c) * hw;
      float* xh = train ? cached_xhat_.data() + (n * C + c) * hw : nullptr;
      for (std::size_t i = 0; i < hw; ++i) {
        const float xhat = static_cast<float>((p[i] - mu) * inv_std);
        if (train) xh[i] = xhat;
        q[i] = g * xhat + b;
      }
    }
  }
  return y;
}

TensorF BatchNorm2d::backward(const TensorF& dy) {
  check(!cached_xhat_.empty(), "BatchNorm2d::backward without train forward");
  const std::size_t N = dy.dim(0), C = dy.dim(1);
  const std::size_t hw = dy.dim(2) * dy.dim(3);
  const double m = static_cast<double>(N * hw);

  if (gamma_.grad.empty()) gamma_.init_zero_grad();
  if (beta_.grad.empty()) beta_.init_zero_grad();

  TensorF dx(dy.shape());
  for (std::size_t c = 0; c < C; ++c) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      const float* d = dy.data() + (n * C + c) * hw;
      const float* xh = cached_xhat_.data() + (n * C + c) * hw;
      for (std::size_t i = 0; i < hw; ++i) {
        sum_dy += d[i];
        sum_dy_xhat += static_cast<double>(d[i]) * xh[i];
      }
    }
    gamma_.grad[c] += static_cast<float>(sum_dy_xhat);
    beta_.grad[c] += static_cast<float>(sum_dy);

    const double scale = gamma_.value[c] * cached_inv_std_[c];
    const double mean_dy = sum_dy / m;
    const double mean_dy_xhat = sum_dy_xhat / m;
    for (std::size_t n = 0; n < N; ++n) {
      const float* d = dy.data() + (n * C + c) * hw;
      const float* xh = cached_xhat_.data() + (n * C + c) * hw;
      float* o = dx.data() + (n * C + c) * hw;
      for (std::size_t i = 0; i < hw; ++i)
        o[i] = static_cast<float>(scale *
                                  (d[i] - mean_dy - xh[i] * mean_dy_xhat));
    }
  }
  return dx;
}

void BatchNorm2d::collect_params(std::vector<Param*>& out) {
  out.push_back(&gamma_);
  out.push_back(&beta_);
}

void BatchNorm2d::collect_buffers(std::vector<Buffer*>& out) {
  out.push_back(&running_mean_);
  out.push_back(&running_var_);
}

// ---------------------------------------------------------------------------
// SNConv2d
// ---------------------------------------------------------------------------

SNConv2d::SNConv2d(std::string name, std::size_t in_ch, std::size_t out_ch,
                   std::size_t kernel, std::size_t stride, std::size_t pad,
                   bool bias)
    : has_bias_(bias),
      in_ch_(in_ch),
      out_ch_(out_ch),
      kernel_(kernel),
      stride_(stride),
      pad_(pad) {
  w_.name = name + ".weight_orig";
  w_.value = TensorF({out_ch, in_ch, kernel, kernel});
  if (bias) {
    b_.name = name + ".bias";
    b_.value = TensorF({out_ch});
  }
  u_.name = name + ".weight_u";
  u_.value = TensorF({out_ch});
}

void SNConv2d::init_he(Rng& rng) {
  const double std =
      std::sqrt(2.0 / static_cast<double>(in_ch_ * kernel_ * kernel_));
  for (std::size_t i = 0; i < w_.value.size(); ++i)
    w_.value[i] = static_cast<float>(rng.normal() * std);
  if (has_bias_) b_.value.zero();
  // Seed the power-iteration vector away from zero and normalize it.
  std::vector<double> u(out_ch_);
  for (auto& x : u) x = rng.normal();
  normalize(u);
  for (std::size_t i = 0; i < out_ch_; ++i)
    u_.value[i] = static_cast<float>(u[i]);
}

void SNConv2d::compute_sn(bool power_iterate) {
  // The kernel [out, in, k, k] is flattened to a matrix M of out_ch rows.
  const std::size_t rows = out_ch_;
  const std::size_t cols = in_ch_ * kernel_ * kernel_;
  const float* M = w_.value.data();

  std::vector<double> u(rows), v(cols);
  for (std::size_t i = 0; i < rows; ++i) u[i] = u_.value[i];

  // v = normalize(M^T u)
  for (std::size_t j = 0; j < cols; ++j) v[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const float* row = M + i * cols;
    const double ui = u[i];
    for (std::size_t j = 0; j < cols; ++j) v[j] += ui * row[j];
  }
  normalize(v);

  if (power_iterate) {
    // u = normalize(M v), persisted for the next step.
    for (std::size_t i = 0; i < rows; ++i) {
      const float* row = M + i * cols;
      double s = 0.0;
      for (std::size_t j = 0; j < cols; ++j) s += row[j] * v[j];
      u[i] = s;
    }
    normalize(u);
    for (std::size_t i = 0; i < rows; ++i)
      u_.value[i] = static_cast<float>(u[i]);
  }

  // sigma = u^T M v
  double sigma = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const float* row = M + i * cols;
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += row[j] * v[j];
    sigma += u[i] * s;
  }
  sigma_ = sigma;
  v_.resize(cols);
  for (std::size_t j = 0; j < cols; ++j) v_[j] = static_cast<float>(v[j]);

  w_sn_ = w_.value;
  const float inv = static_cast<float>(1.0 / sigma_);
  w_sn_ *= inv;
}

TensorF SNConv2d::forward(const TensorF& x, bool train) {
  compute_sn(/*power_iterate=*/train);
  if (train) cached_x_ = x;
  return ops::conv2d(x, w_sn_, has_bias_ ? &b_.value : nullptr, stride_, pad_);
}

TensorF SNConv2d::backward(const TensorF& dy) {
  check(!cached_x_.empty(), "SNConv2d::backward without train-mode forward");
  // G is the gradient w.r.t. the normalized kernel. With u and v treated as
  // constants, d(W/sigma)/dW contributes G/sigma - (<G, W_sn>/sigma) u v^T.
  TensorF g = ops::conv2d_weight_grad(dy, cached_x_, stride_, pad_, kernel_,
                                      kernel_);
  double dot = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    dot += static_cast<double>(g[i]) * w_sn_[i];

  const std::size_t cols = in_ch_ * kernel_ * kernel_;
  TensorF dw(w_.value.shape());
  const double inv_sigma = 1.0 / sigma_;
  for (std::size_t i = 0; i < out_ch_; ++i) {
    const double ui = u_.value[i];
    const float* grow = g.data() + i * cols;
    float* drow = dw.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j)
      drow[j] = static_cast<float>(inv_sigma * (grow[j] - dot * ui * v_[j]));
  }
  if (w_.trainable) {
    accumulate(w_, dw);
    if (has_bias_) accumulate(b_, ops::conv2d_bias_grad(dy));
  }
  return ops::conv2d_input_grad(dy, w_sn_, stride_, pad_, cached_x_.dim(2),
                                cached_x_.dim(3));
}

void SNConv2d::collect_params(std::vector<Param*>& out) {
  out.push_back(&w_);
  if (has_bias_) out.push_back(&b_);
}

void SNConv2d::collect_buffers(std::vector<Buffer*>& out) {
  out.push_back(&u_);
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

void Adam::step(const std::vector<Param*>& params) {
  for (Param* p : params) {
    if (!p->trainable) continue;
    check(!p->grad.empty(), "Adam::step: parameter has no gradient: " + p->name);
    if (p->adam_m.empty()) {
      p->adam_m = TensorF(p->value.shape());
      p->adam_v = TensorF(p->value.shape());
    }
    p->adam_t += 1;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(p->adam_t));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(p->adam_t));
    const float b1 = static_cast<float>(cfg_.beta1);
    const float b2 = static_cast<float>(cfg_.beta2);
    const float wd = static_cast<float>(cfg_.weight_decay);
    const float lr = static_cast<float>(cfg_.lr);
    const float eps = static_cast<float>(cfg_.eps);
    const float inv_bc1 = static_cast<float>(1.0 / bc1);
    const float inv_bc2 = static_cast<float>(1.0 / bc2);
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const float g = p->grad[i] + wd * p->value[i];
      p->adam_m[i] = b1 * p->adam_m[i] + (1.0f - b1) * g;
      p->adam_v[i] = b2 * p->adam_v[i] + (1.0f - b2) * g * g;
      const float mhat = p->adam_m[i] * inv_bc1;
      const float vhat = p->adam_v[i] * inv_bc2;
      p->value[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

void Adam::zero_grad(const std::vector<Param*>& params) {
  for (Param* p : params) {
    if (p->grad.empty())
      p->init_zero_grad();
    else
      p->grad.zero();
  }
}

}  // namespace posegen::nn
