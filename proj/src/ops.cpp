#include "posegen/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "posegen/error.hpp"
#include "posegen/gemm.hpp"

namespace posegen::ops {

namespace {

/// Column-buffer budget per chunk, in bytes. Keeps im2col resident for the
/// common small-resolution case while bounding memory at large resolutions.
constexpr std::size_t kColBudgetBytes = 128ull << 20;

/// Fills a CKK x (rows*OW) column matrix for output rows [oh0, oh1) of one
/// sample. Row r = (c*k + ki)*k + kj holds input samples shifted by (ki, kj).
template <typename T>
void im2col_rows(const T* x, std::size_t C, std::size_t H, std::size_t W,
                 std::size_t k, std::size_t s, std::size_t p, std::size_t OW,
                 std::size_t oh0, std::size_t oh1, T* col) {
  const std::size_t ncols = (oh1 - oh0) * OW;
  for (std::size_t c = 0; c < C; ++c) {
    const T* xc = x + c * H * W;
    for (std::size_t ki = 0; ki < k; ++ki) {
      for (std::size_t kj = 0; kj < k; ++kj) {
        T* row = col + ((c * k + ki) * k + kj) * ncols;
        for (std::size_t oh = oh0; oh < oh1; ++oh) {
          T* out = row + (oh - oh0) * OW;
          const long ih = static_cast<long>(oh * s + ki) - static_cast<long>(p);
          if (ih < 0 || ih >= static_cast<long>(H)) {
            std::fill(out, out + OW, T(0));
            continue;
          }
          const T* xrow = xc + static_cast<std::size_t>(ih) * W;
          for (std::size_t ow = 0; ow < OW; ++ow) {
            const long iw =
                static_cast<long>(ow * s + kj) - static_cast<long>(p);
            out[ow] = (iw >= 0 && iw < static_cast<long>(W))
                          ? xrow[static_cast<std::size_t>(iw)]
                          : T(0);
          }
        }
      }
    }
  }
}

/// Adjoint of im2col_rows: scatter-adds the column matrix back into dx.
template <typename T>
void col2im_rows(const T* col, std::size_t C, std::size_t H, std::size_t W,
                 std::size_t k, std::size_t s, std::size_t p, std::size_t OW,
                 std::size_t oh0, std::size_t oh1, T* dx) {
  const std::size_t ncols = (oh1 - oh0) * OW;
  for (std::size_t c = 0; c < C; ++c) {
    T* dxc = dx + c * H * W;
    for (std::size_t ki = 0; ki < k; ++ki) {
      for (std::size_t kj = 0; kj < k; ++kj) {
        const T* row = col + ((c * k + ki) * k + kj) * ncols;
        for (std::size_t oh = oh0; oh < oh1; ++oh) {
          const T* in = row + (oh - oh0) * OW;
          const long ih = static_cast<long>(oh * s + ki) - static_cast<long>(p);
          if (ih < 0 || ih >= static_cast<long>(H)) continue;
          T* dxrow = dxc + static_cast<std::size_t>(ih) * W;
          for (std::size_t ow = 0; ow < OW; ++ow) {
            const long iw =
                static_cast<long>(ow * s + kj) - static_cast<long>(p);
            if (iw >= 0 && iw < static_cast<long>(W))
              dxrow[static_cast<std::size_t>(iw)] += in[ow];
          }
        }
      }
    }
  }
}

std::size_t chunk_rows_for(std::size_t ckk, std::size_t ow, std::size_t oh,
                           std::size_t elem_size) {
  const std::size_t budget_elems = kColBudgetBytes / elem_size;
  const std::size_t per_row = ckk * ow;
  std::size_t rows = per_row == 0 ? oh : budget_elems / per_row;
  return std::clamp<std::size_t>(rows, 1, oh);
}

/// Gathers columns [c0, c1) of a row-major (rows x total) matrix.
template <typename T>
void gather_cols(const T* src, std::size_t rows, std::size_t total,
                 std::size_t c0, std::size_t c1, T* dst) {
  const std::size_t n = c1 - c0;
  for (std::size_t r = 0; r < rows; ++r)
    std::memcpy(dst + r * n, src + r * total + c0, n * sizeof(T));
}

/// Scatters a row-major (rows x (c1-c0)) matrix into columns [c0, c1).
template <typename T>
void scatter_cols(const T* src, std::size_t rows, std::size_t total,
                  std::size_t c0, std::size_t c1, T* dst) {
  const std::size_t n = c1 - c0;
  for (std::size_t r = 0; r < rows; ++r)
    std::memcpy(dst + r * total + c0, src + r * n, n * sizeof(T));
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>* bias,
                 std::size_t stride, std::size_t pad) {
  check(x.rank() == 4 && w.rank() == 4, "conv2d: rank-4 tensors expected");
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  const std::size_t Co = w.dim(0), k = w.dim(2);
  check(w.dim(1) == C && w.dim(3) == k, "conv2d: kernel shape mismatch");
  check(H + 2 * pad >= k && W + 2 * pad >= k, "conv2d: input smaller than kernel");
  const std::size_t OH = conv_out_size(H, k, stride, pad);
  const std::size_t OW = conv_out_size(W, k, stride, pad);
  const std::size_t ckk = C * k * k;
  const std::size_t ohow = OH * OW;

  Tensor<T> y({N, Co, OH, OW});

  if (k == 1 && stride == 1 && pad == 0) {
    // 1x1 convolution is a plain channel-mixing GEMM; no column buffer.
    for (std::size_t n = 0; n < N; ++n)
      gemm<T>(false, false, Co, ohow, C, T(1), w.data(),
              x.data() + n * C * H * W, T(0), y.data() + n * Co * ohow);
  } else {
    const std::size_t rows_per_chunk = chunk_rows_for(ckk, OW, OH, sizeof(T));
    std::vector<T> col(ckk * rows_per_chunk * OW);
    std::vector<T> tmp;
    for (std::size_t n = 0; n < N; ++n) {
      const T* xn = x.data() + n * C * H * W;
      T* yn = y.data() + n * Co * ohow;
      for (std::size_t oh0 = 0; oh0 < OH; oh0 += rows_per_chunk) {
        const std::size_t oh1 = std::min(OH, oh0 + rows_per_chunk);
        const std::size_t ncols = (oh1 - oh0) * OW;
        im2col_rows(xn, C, H, W, k, stride, pad, OW, oh0, oh1, col.data());
        if (oh0 == 0 && oh1 == OH) {
          gemm<T>(false, false, Co, ncols, ckk, T(1), w.data(), col.data(),
                  T(0), yn);
        } else {
          tmp.resize(Co * ncols);
          gemm<T>(false, false, Co, ncols, ckk, T(1), w.data(), col.data(),
                  T(0), tmp.data());
          scatter_cols(tmp.data(), Co, ohow, oh0 * OW, oh1 * OW, yn);
        }
      }
    }
  }

  if (bias != nullptr) {
    check(bias->rank() == 1 && bias->dim(0) == Co, "conv2d: bias shape");
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t c = 0; c < Co; ++c) {
        T* p = y.data() + (n * Co + c) * ohow;
        const T b = (*bias)[c];
        for (std::size_t i = 0; i < ohow; ++i) p[i] += b;
      }
  }
  return y;
}

template <typename T>
Tensor<T> conv2d_input_grad(const Tensor<T>& dy, const Tensor<T>& w,
                            std::size_t stride, std::size_t pad,
                            std::size_t in_h, std::size_t in_w) {
  const std::size_t N = dy.dim(0), Co = dy.dim(1), OH = dy.dim(2),
                    OW = dy.dim(3);
  const std::size_t C = w.dim(1), k = w.dim(2);
  check(w.dim(0) == Co, "conv2d_input_grad: channel mismatch");
  const std::size_t ckk = C * k * k;
  const std::size_t ohow = OH * OW;

  Tensor<T> dx({N, C, in_h, in_w});

  if (k == 1 && stride == 1 && pad == 0) {
    for (std::size_t n = 0; n < N; ++n)
      gemm<T>(true, false, C, ohow, Co, T(1), w.data(),
              dy.data() + n * Co * ohow, T(0), dx.data() + n * C * ohow);
    return dx;
  }

  const std::size_t rows_per_chunk = chunk_rows_for(ckk, OW, OH, sizeof(T));
  std::vector<T> colg(ckk * rows_per_chunk * OW);
  std::vector<T> dytmp;
  for (std::size_t n = 0; n < N; ++n) {
    const T* dyn = dy.data() + n * Co * ohow;
    T* dxn = dx.data() + n * C * in_h * in_w;
    for (std::size_t oh0 = 0; oh0 < OH; oh0 += rows_per_chunk) {
      const std::size_t oh1 = std::min(OH, oh0 + rows_per_chunk);
      const std::size_t ncols = (oh1 - oh0) * OW;
      const T* dychunk = dyn;
      if (!(oh0 == 0 && oh1 == OH)) {
        dytmp.resize(Co * ncols);
        gather_cols(dyn, Co, ohow, oh0 * OW, oh1 * OW, dytmp.data());
        dychunk = dytmp.data();
      }
      gemm<T>(true, false, ckk, ncols, Co, T(1), w.data(), dychunk, T(0),
              colg.data());
      col2im_rows(colg.data(), C, in_h, in_w, k, stride, pad, OW, oh0, oh1,
                  dxn);
    }
  }
  return dx;
}

template <typename T>
Tensor<T> conv2d_weight_grad(const Tensor<T>& dy, const Tensor<T>& x,
                             std::size_t stride, std::size_t pad,
                             std::size_t kh, std::size_t kw) {
  const std::size_t N = dy.dim(0), Co = dy.dim(1), OH = dy.dim(2),
                    OW = dy.dim(3);
  const std::size_t C = x.dim(1), H = x.dim(2), W = x.dim(3);
  check(x.dim(0) == N, "conv2d_weight_grad: batch mismatch");
  check(kh == kw, "conv2d_weight_grad: square kernels only");
  const std::size_t k = kh;
  const std::size_t ckk = C * k * k;
  const std::size_t ohow = OH * OW;

  Tensor<T> dw({Co, C, k, k});

  if (k == 1 && stride == 1 && pad == 0) {
    for (std::size_t n = 0; n < N; ++n)
      gemm<T>(false, true, Co, C, ohow, T(1), dy.data() + n * Co * ohow,
              x.data() + n * C * H * W, n == 0 ? T(0) : T(1), dw.data());
    return dw;
  }

  const std::size_t rows_per_chunk = chunk_rows_for(ckk, OW, OH, sizeof(T));
  std::vector<T> col(ckk * rows_per_chunk * OW);
  std::vector<T> dytmp;
  bool first = true;
  for (std::size_t n = 0; n < N; ++n) {
    const T* xn = x.data() + n * C * H * W;
    const T* dyn = dy.data() + n * Co * ohow;
    for (std::size_t oh0 = 0; oh0 < OH; oh0 += rows_per_chunk) {
      const std::size_t oh1 = std::min(OH, oh0 + rows_per_chunk);
      const std::size_t ncols = (oh1 - oh0) * OW;
      im2col_rows(xn, C, H, W, k, stride, pad, OW, oh0, oh1, col.data());
      const T* dychunk = dyn;
      if (!(oh0 == 0 && oh1 == OH)) {
        dytmp.resize(Co * ncols);
        gather_cols(dyn, Co, ohow, oh0 * OW, oh1 * OW, dytmp.data());
        dychunk = dytmp.data();
      }
      gemm<T>(false, true, Co, ckk, ncols, T(1), dychunk, col.data(),
              first ? T(0) : T(1), dw.data());
      first = false;
    }
  }
  return dw;
}

template <typename T>
Tensor<T> conv2d_bias_grad(const Tensor<T>& dy) {
  const std::size_t N = dy.dim(0), Co = dy.dim(1);
  const std::size_t ohow = dy.dim(2) * dy.dim(3);
  Tensor<T> db({Co});
  for (std::size_t c = 0; c < Co; ++c) {
    double acc = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      const T* p = dy.data() + (n * Co + c) * ohow;
      for (std::size_t i = 0; i < ohow; ++i) acc += static_cast<double>(p[i]);
    }
    db[c] = static_cast<T>(acc);
  }
  return db;
}

template <typename T>
Tensor<T> avg_pool2(const Tensor<T>& x) {
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  check(H % 2 == 0 && W % 2 == 0, "avg_pool2: spatial dims must be even");
  const std::size_t OH = H / 2, OW = W / 2;
  Tensor<T> y({N, C, OH, OW});
  for (std::size_t nc = 0; nc < N * C; ++nc) {
    const T* xp = x.data() + nc * H * W;
    T* yp = y.data() + nc * OH * OW;
    for (std::size_t oh = 0; oh < OH; ++oh)
      for (std::size_t ow = 0; ow < OW; ++ow) {
        const T* q = xp + (2 * oh) * W + 2 * ow;
        yp[oh * OW + ow] =
            static_cast<T>(0.25) * (q[0] + q[1] + q[W] + q[W + 1]);
      }
  }
  return y;
}

template <typename T>
Tensor<T> avg_pool2_grad(const Tensor<T>& dy) {
  const std::size_t N = dy.dim(0), C = dy.dim(1), OH = dy.dim(2),
                    OW = dy.dim(3);
  Tensor<T> dx({N, C, OH * 2, OW * 2});
  const std::size_t W = OW * 2;
  for (std::size_t nc = 0; nc < N * C; ++nc) {
    const T* dyp = dy.data() + nc * OH * OW;
    T* dxp = dx.data() + nc * 4 * OH * OW;
    for (std::size_t oh = 0; oh < OH; ++oh)
      for (std::size_t ow = 0; ow < OW; ++ow) {
        const T g = static_cast<T>(0.25) * dyp[oh * OW + ow];
        T* q = dxp + (2 * oh) * W + 2 * ow;
        q[0] = g;
        q[1] = g;
        q[W] = g;
        q[W + 1] = g;
      }
  }
  return dx;
}

template <typename T>
Tensor<T> max_pool2(const Tensor<T>& x, Tensor<std::uint8_t>* argmax) {
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  check(H % 2 == 0 && W % 2 == 0, "max_pool2: spatial dims must be even");
  const std::size_t OH = H / 2, OW = W / 2;
  Tensor<T> y({N, C, OH, OW});
  if (argmax != nullptr) *argmax = Tensor<std::uint8_t>({N, C, OH, OW});
  for (std::size_t nc = 0; nc < N * C; ++nc) {
    const T* xp = x.data() + nc * H * W;
    T* yp = y.data() + nc * OH * OW;
    std::uint8_t* ap =
        argmax != nullptr ? argmax->data() + nc * OH * OW : nullptr;
    for (std::size_t oh = 0; oh < OH; ++oh)
      for (std::size_t ow = 0; ow < OW; ++ow) {
        const T* q = xp + (2 * oh) * W + 2 * ow;
        const T v[4] = {q[0], q[1], q[W], q[W + 1]};
        std::size_t best = 0;
        for (std::size_t i = 1; i < 4; ++i)
          if (v[i] > v[best]) best = i;  // first maximum wins ties
        yp[oh * OW + ow] = v[best];
        if (ap != nullptr) ap[oh * OW + ow] = static_cast<std::uint8_t>(best);
      }
  }
  return y;
}

template <typename T>
Tensor<T> max_pool2_grad(const Tensor<T>& dy, const Tensor<std::uint8_t>& argmax,
                         std::size_t in_h, std::size_t in_w) {
  const std::size_t N = dy.dim(0), C = dy.dim(1), OH = dy.dim(2),
                    OW = dy.dim(3);
  check(argmax.shape() == dy.shape(), "max_pool2_grad: argmax shape");
  Tensor<T> dx({N, C, in_h, in_w});
  for (std::size_t nc = 0; nc < N * C; ++nc) {
    const T* dyp = dy.data() + nc * OH * OW;
    const std::uint8_t* ap = argmax.data() + nc * OH * OW;
    T* dxp = dx.data() + nc * in_h * in_w;
    for (std::size_t oh = 0; oh < OH; ++oh)
      for (std::size_t ow = 0; ow < OW; ++ow) {
        const std::size_t a = ap[oh * OW + ow];
        const std::size_t ih = 2 * oh + a / 2, iw = 2 * ow + a % 2;
        dxp[ih * in_w + iw] += dyp[oh * OW + ow];
      }
  }
  return dx;
}

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, std::size_t factor) {
  check(factor >= 1, "upsample_nearest: factor must be >= 1");
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  const std::size_t OH = H * factor, OW = W * factor;
  Tensor<T> y({N, C, OH, OW});
  for (std::size_t nc = 0; nc < N * C; ++nc) {
    const T* xp = x.data() + nc * H * W;
    T* yp = y.data() + nc * OH * OW;
    for (std::size_t oh = 0; oh < OH; ++oh) {
      const T* xrow = xp + (oh / factor) * W;
      T* yrow = yp + oh * OW;
      for (std::size_t ow = 0; ow < OW; ++ow) yrow[ow] = xrow[ow / factor];
    }
  }
  return y;
}

template <typename T>
Tensor<T> upsample_nearest_grad(const Tensor<T>& dy, std::size_t factor) {
  const std::size_t N = dy.dim(0), C = dy.dim(1), OH = dy.dim(2),
                    OW = dy.dim(3);
  check(OH % factor == 0 && OW % factor == 0,
        "upsample_nearest_grad: dims not divisible by factor");
  const std::size_t H = OH / factor, W = OW / factor;
  Tensor<T> dx({N, C, H, W});
  for (std::size_t nc = 0; nc < N * C; ++nc) {
    const T* dyp = dy.data() + nc * OH * OW;
    T* dxp = dx.data() + nc * H * W;
    for (std::size_t oh = 0; oh < OH; ++oh) {
      const T* dyrow = dyp + oh * OW;
      T* dxrow = dxp + (oh / factor) * W;
      for (std::size_t ow = 0; ow < OW; ++ow) dxrow[ow / factor] += dyrow[ow];
    }
  }
  return dx;
}

template <typename T>
void leaky_relu(Tensor<T>& x, T slope) {
  T* p = x.data();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (p[i] < T(0)) p[i] *= slope;
}

template <typename T>
Tensor<T> leaky_relu_grad(const Tensor<T>& dy, const Tensor<T>& y, T slope) {
  check(dy.same_shape(y), "leaky_relu_grad: shape mismatch");
  Tensor<T> dx(dy.shape());
  for (std::size_t i = 0; i < dy.size(); ++i)
    dx[i] = y[i] > T(0) ? dy[i] : dy[i] * slope;
  return dx;
}

template <typename T>
void relu(Tensor<T>& x) {
  T* p = x.data();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (p[i] < T(0)) p[i] = T(0);
}

template <typename T>
Tensor<T> relu_grad(const Tensor<T>& dy, const Tensor<T>& y) {
  check(dy.same_shape(y), "relu_grad: shape mismatch");
  Tensor<T> dx(dy.shape());
  for (std::size_t i = 0; i < dy.size(); ++i)
    dx[i] = y[i] > T(0) ? dy[i] : T(0);
  return dx;
}

template <typename T>
void tanh_inplace(Tensor<T>& x) {
  T* p = x.data();
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = std::tanh(p[i]);
}

template <typename T>
Tensor<T> tanh_grad(const Tensor<T>& dy, const Tensor<T>& y) {
  check(dy.same_shape(y), "tanh_grad: shape mismatch");
  Tensor<T> dx(dy.shape());
  for (std::size_t i = 0; i < dy.size(); ++i)
    dx[i] = dy[i] * (T(1) - y[i] * y[i]);
  return dx;
}

template <typename T>
void sigmoid(Tensor<T>& x) {
  T* p = x.data();
  for (std::size_t i = 0; i < x.size(); ++i)
    p[i] = T(1) / (T(1) + std::exp(-p[i]));
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  check(a.rank() == 4 && b.rank() == 4, "concat_channels: rank-4 expected");
  check(a.dim(0) == b.dim(0) && a.dim(2) == b.dim(2) && a.dim(3) == b.dim(3),
        "concat_channels: incompatible shapes");
  const std::size_t N = a.dim(0), Ca = a.dim(1), Cb = b.dim(1);
  const std::size_t hw = a.dim(2) * a.dim(3);
  Tensor<T> y({N, Ca + Cb, a.dim(2), a.dim(3)});
  for (std::size_t n = 0; n < N; ++n) {
    std::memcpy(y.data() + n * (Ca + Cb) * hw, a.data() + n * Ca * hw,
                Ca * hw * sizeof(T));
    std::memcpy(y.data() + (n * (Ca + Cb) + Ca) * hw, b.data() + n * Cb * hw,
                Cb * hw * sizeof(T));
  }
  return y;
}

template <typename T>
void split_channels(const Tensor<T>& d, std::size_t ca, Tensor<T>& da,
                    Tensor<T>& db) {
  const std::size_t N = d.dim(0), C = d.dim(1);
  const std::size_t hw = d.dim(2) * d.dim(3);
  check(ca <= C, "split_channels: ca exceeds channel count");
  const std::size_t cb = C - ca;
  da = Tensor<T>({N, ca, d.dim(2), d.dim(3)});
  db = Tensor<T>({N, cb, d.dim(2), d.dim(3)});
  for (std::size_t n = 0; n < N; ++n) {
    std::memcpy(da.data() + n * ca * hw, d.data() + n * C * hw,
                ca * hw * sizeof(T));
    std::memcpy(db.data() + n * cb * hw, d.data() + (n * C + ca) * hw,
                cb * hw * sizeof(T));
  }
}

template <typename T>
Tensor<T> crop(const Tensor<T>& x, std::size_t n, std::size_t y0,
               std::size_t x0, std::size_t side) {
  const std::size_t C = x.dim(1), H = x.dim(2), W = x.dim(3);
  check(n < x.dim(0) && y0 + side <= H && x0 + side <= W,
        "crop: window out of bounds");
  Tensor<T> y({1, C, side, side});
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t r = 0; r < side; ++r)
      std::memcpy(y.data() + (c * side + r) * side,
                  x.data() + ((n * C + c) * H + y0 + r) * W + x0,
                  side * sizeof(T));
  return y;
}

template <typename T>
void crop_add(Tensor<T>& dx, std::size_t n, std::size_t y0, std::size_t x0,
              const Tensor<T>& g) {
  const std::size_t C = dx.dim(1), H = dx.dim(2), W = dx.dim(3);
  const std::size_t side = g.dim(2);
  check(g.dim(1) == C && g.dim(3) == side, "crop_add: shape mismatch");
  check(n < dx.dim(0) && y0 + side <= H && x0 + side <= W,
        "crop_add: window out of bounds");
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t r = 0; r < side; ++r) {
      T* dst = dx.data() + ((n * C + c) * H + y0 + r) * W + x0;
      const T* src = g.data() + (c * side + r) * side;
      for (std::size_t i = 0; i < side; ++i) dst[i] += src[i];
    }
}

template <typename T>
double sum(const Tensor<T>& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    acc += static_cast<double>(x[i]);
  return acc;
}

template <typename T>
double mean(const Tensor<T>& x) {
  check(x.size() > 0, "mean: empty tensor");
  return sum(x) / static_cast<double>(x.size());
}

// Explicit instantiations: training runs in float, gradient-check oracles in
// double.
#define POSEGEN_INSTANTIATE_OPS(T)                                            \
  template Tensor<T> conv2d<T>(const Tensor<T>&, const Tensor<T>&,            \
                               const Tensor<T>*, std::size_t, std::size_t);   \
  template Tensor<T> conv2d_input_grad<T>(const Tensor<T>&, const Tensor<T>&, \
                                          std::size_t, std::size_t,           \
                                          std::size_t, std::size_t);          \
  template Tensor<T> conv2d_weight_grad<T>(const Tensor<T>&,                  \
                                           const Tensor<T>&, std::size_t,     \
                                           std::size_t, std::size_t,          \
                                           std::size_t);                      \
  template Tensor<T> conv2d_bias_grad<T>(const Tensor<T>&);                   \
  template Tensor<T> avg_pool2<T>(const Tensor<T>&);                          \
  template Tensor<T> avg_pool2_grad<T>(const Tensor<T>&);                     \
  template Tensor<T> max_pool2<T>(const Tensor<T>&, Tensor<std::uint8_t>*);   \
  template Tensor<T> max_pool2_grad<T>(const Tensor<T>&,                      \
                                       const Tensor<std::uint8_t>&,           \
                                       std::size_t, std::size_t);             \
  template Tensor<T> upsample_nearest<T>(const Tensor<T>&, std::size_t);      \
  template Tensor<T> upsample_nearest_grad<T>(const Tensor<T>&, std::size_t); \
  template void leaky_relu<T>(Tensor<T>&, T);                                 \
  template Tensor<T> leaky_relu_grad<T>(const Tensor<T>&, const Tensor<T>&,   \
                                        T);                                   \
  template void relu<T>(Tensor<T>&);                                          \
  template Tensor<T> relu_grad<T>(const Tensor<T>&, const Tensor<T>&);        \
  template void tanh_inplace<T>(Tensor<T>&);                                  \
  template Tensor<T> tanh_grad<T>(const Tensor<T>&, const Tensor<T>&);        \
  template void sigmoid<T>(Tensor<T>&);                                       \
  template Tensor<T> concat_channels<T>(const Tensor<T>&, const Tensor<T>&);  \
  template void split_channels<T>(const Tensor<T>&, std::size_t, Tensor<T>&,  \
                                  Tensor<T>&);                                \
  template Tensor<T> crop<T>(const Tensor<T>&, std::size_t, std::size_t,      \
                             std::size_t, std::size_t);                       \
  template void crop_add<T>(Tensor<T>&, std::size_t, std::size_t,             \
                            std::size_t, const Tensor<T>&);                   \
  template double sum<T>(const Tensor<T>&);                                   \
  template double mean<T>(const Tensor<T>&);

POSEGEN_INSTANTIATE_OPS(float)
POSEGEN_INSTANTIATE_OPS(double)

#undef POSEGEN_INSTANTIATE_OPS

}  // namespace posegen::ops
