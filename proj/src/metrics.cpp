#include "posegen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "posegen/error.hpp"

namespace posegen::metrics {
namespace {

constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;
constexpr double kC1 = kK1 * kK1;  // dynamic range 1
constexpr double kC2 = kK2 * kK2;
constexpr std::size_t kWindowSide = 11;
constexpr double kWindowSigma = 1.5;
constexpr std::size_t kMsScales = 5;
constexpr double kMsWeights[kMsScales] = {0.0448, 0.2856, 0.3001, 0.2363,
                                          0.1333};
// Four halvings must leave room for the 11-px window: 11 * 2^4 = 176.
constexpr std::size_t kMsMinSide = 176;

struct PlaneView {
  const float* data;
  std::size_t c, h, w;
};

PlaneView plane_view(const TensorF& t, const char* what) {
  const bool ok =
      t.rank() == 3 || (t.rank() == 4 && t.dim(0) == 1);
  check(ok, std::string(what) + " must be a [C, H, W] image");
  const std::size_t off = t.rank() == 4 ? 1 : 0;
  return {t.storage().data(), t.dim(off), t.dim(off + 1), t.dim(off + 2)};
}

std::vector<double> gaussian_window(std::size_t side) {
  std::vector<double> w(side);
  const double center = (static_cast<double>(side) - 1.0) / 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < side; ++i) {
    const double d = static_cast<double>(i) - center;
    w[i] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Valid-mode separable filtering: rows then columns with the same 1D kernel.
std::vector<double> filter_valid(const std::vector<double>& in, std::size_t h,
                                 std::size_t w, const std::vector<double>& k,
                                 std::size_t& oh, std::size_t& ow) {
  const std::size_t side = k.size();
  ow = w - side + 1;
  oh = h - side + 1;
  std::vector<double> rows(h * ow);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < side; ++i) acc += k[i] * in[y * w + x + i];
      rows[y * ow + x] = acc;
    }
  }
  std::vector<double> out(oh * ow);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < side; ++i) acc += k[i] * rows[(y + i) * ow + x];
      out[y * ow + x] = acc;
    }
  }
  return out;
}

// Mean SSIM and mean contrast-structure term over one channel plane pair
// (already remapped to [0, 1]).
void ssim_channel(const std::vector<double>& pa, const std::vector<double>& pb,
                  std::size_t h, std::size_t w, std::size_t side,
                  double& mean_ssim, double& mean_cs) {
  const std::vector<double> k = gaussian_window(side);
  const std::size_t n = h * w;
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = pa[i] * pa[i];
    bb[i] = pb[i] * pb[i];
    ab[i] = pa[i] * pb[i];
  }
  std::size_t oh = 0, ow = 0;
  const std::vector<double> mu_a = filter_valid(pa, h, w, k, oh, ow);
  const std::vector<double> mu_b = filter_valid(pb, h, w, k, oh, ow);
  const std::vector<double> m_aa = filter_valid(aa, h, w, k, oh, ow);
  const std::vector<double> m_bb = filter_valid(bb, h, w, k, oh, ow);
  const std::vector<double> m_ab = filter_valid(ab, h, w, k, oh, ow);

  double ssim_acc = 0.0, cs_acc = 0.0;
  for (std::size_t i = 0; i < oh * ow; ++i) {
    const double va = m_aa[i] - mu_a[i] * mu_a[i];
    const double vb = m_bb[i] - mu_b[i] * mu_b[i];
    const double cov = m_ab[i] - mu_a[i] * mu_b[i];
    const double l = (2.0 * mu_a[i] * mu_b[i] + kC1) /
                     (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1);
    const double cs = (2.0 * cov + kC2) / (va + vb + kC2);
    ssim_acc += l * cs;
    cs_acc += cs;
  }
  const double count = static_cast<double>(oh * ow);
  mean_ssim = ssim_acc / count;
  mean_cs = cs_acc / count;
}

// Channel plane remapped from [-1, 1] to [0, 1].
std::vector<double> remap01(const PlaneView& v, std::size_t channel) {
  std::vector<double> out(v.h * v.w);
  const float* src = v.data + channel * v.h * v.w;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (static_cast<double>(src[i]) + 1.0) / 2.0;
  }
  return out;
}

std::vector<double> pool2_floor(const std::vector<double>& in, std::size_t h,
                                std::size_t w, std::size_t& oh,
                                std::size_t& ow) {
  oh = h / 2;  // odd trailing row/column dropped
  ow = w / 2;
  std::vector<double> out(oh * ow);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      out[y * ow + x] = 0.25 * (in[(2 * y) * w + 2 * x] +
                                in[(2 * y) * w + 2 * x + 1] +
                                in[(2 * y + 1) * w + 2 * x] +
                                in[(2 * y + 1) * w + 2 * x + 1]);
    }
  }
  return out;
}

}  // namespace

double ssim(const TensorF& a, const TensorF& b) {
  check(a.shape() == b.shape(), "ssim inputs must share a shape");
  const PlaneView va = plane_view(a, "ssim input");
  const PlaneView vb = plane_view(b, "ssim input");
  const std::size_t side = std::min({kWindowSide, va.h, va.w});
  check(side > 0, "ssim inputs must be non-empty");

  double acc = 0.0;
  for (std::size_t c = 0; c < va.c; ++c) {
    const std::vector<double> pa = remap01(va, c);
    const std::vector<double> pb = remap01(vb, c);
    double mean_ssim = 0.0, mean_cs = 0.0;
    ssim_channel(pa, pb, va.h, va.w, side, mean_ssim, mean_cs);
    acc += mean_ssim;
  }
  return acc / static_cast<double>(va.c);
}

double ms_ssim(const TensorF& a, const TensorF& b) {
  check(a.shape() == b.shape(), "ms_ssim inputs must share a shape");
  const PlaneView va = plane_view(a, "ms_ssim input");
  const PlaneView vb = plane_view(b, "ms_ssim input");
  check(std::min(va.h, va.w) >= kMsMinSide,
        "ms_ssim needs at least " + std::to_string(kMsMinSide) +
            " px on each side (five dyadic scales under an 11-px window)");

  double total = 0.0;
  for (std::size_t c = 0; c < va.c; ++c) {
    std::vector<double> pa = remap01(va, c);
    std::vector<double> pb = remap01(vb, c);
    std::size_t h = va.h, w = va.w;
    double score = 1.0;
    for (std::size_t scale = 0; scale < kMsScales; ++scale) {
      double mean_ssim = 0.0, mean_cs = 0.0;
      ssim_channel(pa, pb, h, w, kWindowSide, mean_ssim, mean_cs);
      const double term = scale + 1 == kMsScales ? std::max(mean_ssim, 0.0)
                                                 : std::max(mean_cs, 0.0);
      score *= std::pow(term, kMsWeights[scale]);
      if (scale + 1 < kMsScales) {
        std::size_t nh = 0, nw = 0;
        pa = pool2_floor(pa, h, w, nh, nw);
        pb = pool2_floor(pb, h, w, nh, nw);
        h = nh;
        w = nw;
      }
    }
    total += score;
  }
  return total / static_cast<double>(va.c);
}

double local_ssim(const TensorF& a, const TensorF& b,
                  const DescriptorSet& ds) {
  check(!ds.centers.empty(), "local_ssim needs at least one descriptor");
  const std::vector<TensorF> crops_a = extract_crops(a, ds);
  const std::vector<TensorF> crops_b = extract_crops(b, ds);
  double acc = 0.0;
  for (std::size_t i = 0; i < crops_a.size(); ++i) {
    acc += ssim(crops_a[i], crops_b[i]);
  }
  return acc / static_cast<double>(crops_a.size());
}

double perceptual_distance(const TensorF& a, const TensorF& b,
                           FeatureExtractor& fx) {
  check(a.shape() == b.shape(),
        "perceptual_distance inputs must share a shape");
  const PlaneView va = plane_view(a, "perceptual_distance input");
  check(va.c == 3, "perceptual_distance expects RGB inputs");

  TensorF a4(std::vector<std::size_t>{1, va.c, va.h, va.w});
  TensorF b4(a4.shape());
  std::copy(a.storage().begin(), a.storage().end(), a4.storage().begin());
  std::copy(b.storage().begin(), b.storage().end(), b4.storage().begin());

  const std::vector<TensorF> ta = fx.features(a4, /*need_grad=*/false);
  const std::vector<TensorF> tb = fx.features(b4, /*need_grad=*/false);

  constexpr double kNormEps = 1e-10;
  double total = 0.0;
  for (std::size_t t = 0; t < ta.size(); ++t) {
    const std::size_t ch = ta[t].dim(1);
    const std::size_t hw = ta[t].dim(2) * ta[t].dim(3);
    const float* xa = ta[t].storage().data();
    const float* xb = tb[t].storage().data();
    double tap_acc = 0.0;
    for (std::size_t i = 0; i < hw; ++i) {
      double na = 0.0, nb = 0.0;
      for (std::size_t c = 0; c < ch; ++c) {
        na += static_cast<double>(xa[c * hw + i]) * xa[c * hw + i];
        nb += static_cast<double>(xb[c * hw + i]) * xb[c * hw + i];
      }
      na = std::sqrt(na) + kNormEps;
      nb = std::sqrt(nb) + kNormEps;
      for (std::size_t c = 0; c < ch; ++c) {
        const double d = xa[c * hw + i] / na - xb[c * hw + i] / nb;
        tap_acc += d * d;
      }
    }
    total += tap_acc / static_cast<double>(ch * hw);
  }
  return total / static_cast<double>(ta.size());
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j{{"ssim", ssim},
                   {"ms_ssim", nullptr},
                   {"local_ssim", local_ssim},
                   {"perceptual_distance", perceptual_distance},
                   {"n_pairs", n_pairs}};
  if (has_ms_ssim) j["ms_ssim"] = ms_ssim;
  return j;
}

}  // namespace posegen::metrics
