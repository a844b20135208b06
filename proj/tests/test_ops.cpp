#include "doctest.h"

#include <cmath>
#include <vector>

#include "posegen/ops.hpp"
#include "posegen/rng.hpp"
#include "posegen/tensor.hpp"

using posegen::Rng;
using posegen::Tensor;
using posegen::TensorD;
using posegen::TensorF;
namespace ops = posegen::ops;

namespace {

template <typename T>
Tensor<T> random_tensor(std::vector<std::size_t> shape, Rng& rng,
                        double scale = 1.0) {
  Tensor<T> t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = static_cast<T>(rng.normal() * scale);
  return t;
}

/// Direct convolution by definition; the oracle for the GEMM path.
template <typename T>
Tensor<T> conv2d_naive(const Tensor<T>& x, const Tensor<T>& w,
                       const Tensor<T>* bias, std::size_t s, std::size_t p) {
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  const std::size_t Co = w.dim(0), k = w.dim(2);
  const std::size_t OH = ops::conv_out_size(H, k, s, p);
  const std::size_t OW = ops::conv_out_size(W, k, s, p);
  Tensor<T> y({N, Co, OH, OW});
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t co = 0; co < Co; ++co)
      for (std::size_t oh = 0; oh < OH; ++oh)
        for (std::size_t ow = 0; ow < OW; ++ow) {
          double acc = bias != nullptr ? (*bias)[co] : 0.0;
          for (std::size_t c = 0; c < C; ++c)
            for (std::size_t ki = 0; ki < k; ++ki)
              for (std::size_t kj = 0; kj < k; ++kj) {
                const long ih = static_cast<long>(oh * s + ki) - static_cast<long>(p);
                const long iw = static_cast<long>(ow * s + kj) - static_cast<long>(p);
                if (ih < 0 || ih >= static_cast<long>(H) || iw < 0 ||
                    iw >= static_cast<long>(W))
                  continue;
                acc += static_cast<double>(
                           x.at(n, c, static_cast<std::size_t>(ih),
                                static_cast<std::size_t>(iw))) *
                       w.at(co, c, ki, kj);
              }
          y.at(n, co, oh, ow) = static_cast<T>(acc);
        }
  return y;
}

double max_abs_diff(const TensorD& a, const TensorD& b) {
  REQUIRE(a.shape() == b.shape());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("conv2d matches direct convolution") {
  Rng rng(17);
  struct Case {
    std::size_t C, H, W, Co, k, s, p;
  };
  const Case cases[] = {
      {3, 8, 8, 5, 3, 1, 1},   // same-size 3x3
      {4, 9, 7, 2, 3, 2, 1},   // stride 2, odd dims
      {2, 6, 6, 7, 1, 1, 0},   // 1x1 fast path
      {1, 5, 5, 1, 3, 1, 0},   // valid conv
      {6, 4, 4, 3, 3, 2, 1},   // discriminator-style halving
  };
  for (const auto& c : cases) {
    CAPTURE(c.C);
    CAPTURE(c.k);
    CAPTURE(c.s);
    auto x = random_tensor<double>({2, c.C, c.H, c.W}, rng);
    auto w = random_tensor<double>({c.Co, c.C, c.k, c.k}, rng);
    auto b = random_tensor<double>({c.Co}, rng);
    auto got = ops::conv2d(x, w, &b, c.s, c.p);
    auto want = conv2d_naive(x, w, &b, c.s, c.p);
    CHECK(max_abs_diff(got, want) < 1e-10);
  }
}

TEST_CASE("conv2d gradients pass finite-difference checks") {
  Rng rng(99);
  struct Case {
    std::size_t C, H, W, Co, k, s, p;
  };
  const Case cases[] = {
      {2, 6, 6, 3, 3, 1, 1},
      {3, 7, 6, 2, 3, 2, 1},
      {2, 5, 5, 4, 1, 1, 0},
  };
  const double h = 1e-6;
  for (const auto& c : cases) {
    CAPTURE(c.s);
    auto x = random_tensor<double>({2, c.C, c.H, c.W}, rng);
    auto w = random_tensor<double>({c.Co, c.C, c.k, c.k}, rng);
    auto b = random_tensor<double>({c.Co}, rng);
    // Scalar objective: weighted sum of outputs, fixed random weights.
    auto y0 = ops::conv2d(x, w, &b, c.s, c.p);
    auto gy = random_tensor<double>(y0.shape(), rng);
    auto loss = [&](const TensorD& xx, const TensorD& ww, const TensorD& bb) {
      auto y = ops::conv2d(xx, ww, &bb, c.s, c.p);
      double acc = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) acc += y[i] * gy[i];
      return acc;
    };

    auto dx = ops::conv2d_input_grad(gy, w, c.s, c.p, c.H, c.W);
    auto dw = ops::conv2d_weight_grad(gy, x, c.s, c.p, c.k, c.k);
    auto db = ops::conv2d_bias_grad(gy);

    for (std::size_t trial = 0; trial < 6; ++trial) {
      const std::size_t i = rng.below(x.size());
      TensorD xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (loss(xp, w, b) - loss(xm, w, b)) / (2 * h);
      CHECK(dx[i] == doctest::Approx(fd).epsilon(1e-5));
    }
    for (std::size_t trial = 0; trial < 6; ++trial) {
      const std::size_t i = rng.below(w.size());
      TensorD wp = w, wm = w;
      wp[i] += h;
      wm[i] -= h;
      const double fd = (loss(x, wp, b) - loss(x, wm, b)) / (2 * h);
      CHECK(dw[i] == doctest::Approx(fd).epsilon(1e-5));
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      TensorD bp = b, bm = b;
      bp[i] += h;
      bm[i] -= h;
      const double fd = (loss(x, w, bp) - loss(x, w, bm)) / (2 * h);
      CHECK(db[i] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("pooling and upsampling round-trip adjoints") {
  Rng rng(5);
  auto x = random_tensor<double>({2, 3, 8, 6}, rng);

  SUBCASE("avg_pool2 value and gradient") {
    auto y = ops::avg_pool2(x);
    CHECK(y.dim(2) == 4);
    CHECK(y.dim(3) == 3);
    CHECK(y.at(0, 0, 0, 0) ==
          doctest::Approx(0.25 * (x.at(0, 0, 0, 0) + x.at(0, 0, 0, 1) +
                                  x.at(0, 0, 1, 0) + x.at(0, 0, 1, 1))));
    // <A x, y> == <x, A^T y> for the linear map and its adjoint.
    auto gy = random_tensor<double>(y.shape(), rng);
    auto gx = ops::avg_pool2_grad(gy);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) lhs += y[i] * gy[i];
    for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * gx[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }

  SUBCASE("max_pool2 picks first maximum and routes gradient") {
    TensorD t({1, 1, 2, 2});
    t.at(0, 0, 0, 0) = 7.0;
    t.at(0, 0, 0, 1) = 7.0;  // tie: first wins
    t.at(0, 0, 1, 0) = -1.0;
    t.at(0, 0, 1, 1) = 3.0;
    Tensor<std::uint8_t> am;
    auto y = ops::max_pool2(t, &am);
    CHECK(y.at(0, 0, 0, 0) == 7.0);
    CHECK(am.at(0, 0, 0, 0) == 0);
    TensorD gy({1, 1, 1, 1});
    gy[0] = 2.5;
    auto gx = ops::max_pool2_grad(gy, am, 2, 2);
    CHECK(gx.at(0, 0, 0, 0) == 2.5);
    CHECK(gx.at(0, 0, 0, 1) == 0.0);
  }

  SUBCASE("nearest upsample replicates and its adjoint sums") {
    auto y = ops::upsample_nearest(x, 2);
    CHECK(y.dim(2) == 16);
    CHECK(y.at(0, 1, 5, 5) == x.at(0, 1, 2, 2));
    auto gy = random_tensor<double>(y.shape(), rng);
    auto gx = ops::upsample_nearest_grad(gy, 2);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) lhs += y[i] * gy[i];
    for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * gx[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    // factor 4 covers the patch-enlargement path
    auto y4 = ops::upsample_nearest(x, 4);
    CHECK(y4.dim(3) == 24);
    CHECK(y4.at(1, 2, 13, 9) == x.at(1, 2, 3, 2));
  }
}

TEST_CASE("activations and their derivatives") {
  Rng rng(23);
  auto x = random_tensor<double>({1, 2, 4, 4}, rng);
  const double h = 1e-7;

  SUBCASE("leaky relu") {
    auto y = x;
    ops::leaky_relu(y, 0.2);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(y[i] == doctest::Approx(x[i] >= 0 ? x[i] : 0.2 * x[i]));
    auto gy = random_tensor<double>(x.shape(), rng);
    auto gx = ops::leaky_relu_grad(gy, y, 0.2);
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      ops::leaky_relu(xp, 0.2);
      ops::leaky_relu(xm, 0.2);
      const double fd = (xp[i] - xm[i]) / (2 * h) * gy[i];
      CHECK(gx[i] == doctest::Approx(fd).epsilon(1e-5));
    }
  }

  SUBCASE("tanh") {
    auto y = x;
    ops::tanh_inplace(y);
    auto gy = random_tensor<double>(x.shape(), rng);
    auto gx = ops::tanh_grad(gy, y);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double fd = (std::tanh(x[i] + h) - std::tanh(x[i] - h)) / (2 * h);
      CHECK(gx[i] == doctest::Approx(fd * gy[i]).epsilon(1e-5));
    }
  }

  SUBCASE("sigmoid") {
    auto y = x;
    ops::sigmoid(y);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(y[i] == doctest::Approx(1.0 / (1.0 + std::exp(-x[i]))));
  }
}

TEST_CASE("concat, split and crop bookkeeping") {
  Rng rng(31);
  auto a = random_tensor<double>({2, 3, 4, 4}, rng);
  auto b = random_tensor<double>({2, 5, 4, 4}, rng);
  auto cat = ops::concat_channels(a, b);
  CHECK(cat.dim(1) == 8);
  CHECK(cat.at(1, 2, 3, 3) == a.at(1, 2, 3, 3));
  CHECK(cat.at(1, 3, 0, 0) == b.at(1, 0, 0, 0));

  TensorD da, db;
  ops::split_channels(cat, 3, da, db);
  CHECK(max_abs_diff(da, a) == 0.0);
  CHECK(max_abs_diff(db, b) == 0.0);

  auto patch = ops::crop(cat, 1, 1, 2, 2);
  CHECK(patch.shape() == std::vector<std::size_t>{1, 8, 2, 2});
  CHECK(patch.at(0, 0, 0, 0) == cat.at(1, 0, 1, 2));

  TensorD dx({2, 8, 4, 4});
  ops::crop_add(dx, 1, 1, 2, patch);
  CHECK(dx.at(1, 0, 1, 2) == patch.at(0, 0, 0, 0));
  CHECK(dx.at(0, 0, 1, 2) == 0.0);

  CHECK_THROWS(ops::crop(cat, 0, 3, 3, 2));  // window leaves the image
}

TEST_CASE("reductions use stable accumulation") {
  TensorF t({1, 1, 1, 4});
  t[0] = 1e8f;
  t[1] = 1.0f;
  t[2] = -1e8f;
  t[3] = 1.0f;
  CHECK(ops::sum(t) == doctest::Approx(2.0));
  CHECK(ops::mean(t) == doctest::Approx(0.5));
}
