#pragma once

#include <cstdint>
#include <cstddef>

#include "posegen/tensor.hpp"

namespace posegen::ops {

/// Spatial output size of a convolution / pooling window.
inline std::size_t conv_out_size(std::size_t in, std::size_t k, std::size_t s,
                                 std::size_t p) {
  return (in + 2 * p - k) / s + 1;
}

// ---------------------------------------------------------------------------
// Convolution (NCHW, square kernels). Implemented as im2col + GEMM with the
// column buffer built in bounded chunks so activations at large resolutions
// do not blow up memory. All loops are serial, so results are bit-stable
// across runs.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>* bias,
                 std::size_t stride, std::size_t pad);

/// Gradient w.r.t. the convolution input (col2im of W^T * dY).
template <typename T>
Tensor<T> conv2d_input_grad(const Tensor<T>& dy, const Tensor<T>& w,
                            std::size_t stride, std::size_t pad,
                            std::size_t in_h, std::size_t in_w);

/// Gradient w.r.t. the kernel, accumulated serially over the batch.
template <typename T>
Tensor<T> conv2d_weight_grad(const Tensor<T>& dy, const Tensor<T>& x,
                             std::size_t stride, std::size_t pad,
                             std::size_t kh, std::size_t kw);

/// Gradient w.r.t. the bias: sum of dY over batch and spatial dims.
template <typename T>
Tensor<T> conv2d_bias_grad(const Tensor<T>& dy);

// ---------------------------------------------------------------------------
// Pooling and resampling.
// ---------------------------------------------------------------------------

/// 2x2 average pooling, stride 2. Spatial dims must be even.
template <typename T>
Tensor<T> avg_pool2(const Tensor<T>& x);

template <typename T>
Tensor<T> avg_pool2_grad(const Tensor<T>& dy);

/// 2x2 max pooling, stride 2; optionally records the in-window argmax
/// (0..3, first maximum wins) for the backward pass.
template <typename T>
Tensor<T> max_pool2(const Tensor<T>& x, Tensor<std::uint8_t>* argmax);

template <typename T>
Tensor<T> max_pool2_grad(const Tensor<T>& dy, const Tensor<std::uint8_t>& argmax,
                         std::size_t in_h, std::size_t in_w);

/// Integer-factor nearest-neighbour upsampling.
template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, std::size_t factor);

/// Adjoint of nearest upsampling: sums each factor x factor cell.
template <typename T>
Tensor<T> upsample_nearest_grad(const Tensor<T>& dy, std::size_t factor);

// ---------------------------------------------------------------------------
// Activations. Forward variants transform in place; backward variants take
// the forward *output*, which fully determines the local slope for these
// functions and avoids keeping pre-activation copies alive.
// ---------------------------------------------------------------------------

template <typename T>
void leaky_relu(Tensor<T>& x, T slope);

template <typename T>
Tensor<T> leaky_relu_grad(const Tensor<T>& dy, const Tensor<T>& y, T slope);

template <typename T>
void relu(Tensor<T>& x);

template <typename T>
Tensor<T> relu_grad(const Tensor<T>& dy, const Tensor<T>& y);

template <typename T>
void tanh_inplace(Tensor<T>& x);

template <typename T>
Tensor<T> tanh_grad(const Tensor<T>& dy, const Tensor<T>& y);

template <typename T>
void sigmoid(Tensor<T>& x);

// ---------------------------------------------------------------------------
// Structure: channel concat/split, per-sample crops.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);

/// Splits dD of concat_channels(a, b) back into dA (first ca channels) and dB.
template <typename T>
void split_channels(const Tensor<T>& d, std::size_t ca, Tensor<T>& da,
                    Tensor<T>& db);

/// Copies the side x side window at (y0, x0) of sample n into a [1,C,side,side]
/// tensor. The window must lie inside the image.
template <typename T>
Tensor<T> crop(const Tensor<T>& x, std::size_t n, std::size_t y0,
               std::size_t x0, std::size_t side);

/// Adjoint of crop: accumulates g into the window of sample n of dx.
template <typename T>
void crop_add(Tensor<T>& dx, std::size_t n, std::size_t y0, std::size_t x0,
              const Tensor<T>& g);

// ---------------------------------------------------------------------------
// Reductions (double accumulators regardless of element type).
// ---------------------------------------------------------------------------

template <typename T>
double sum(const Tensor<T>& x);

template <typename T>
double mean(const Tensor<T>& x);

}  // namespace posegen::ops
