#include "posegen/losses.hpp"

#include <cmath>
#include <vector>

#include "posegen/error.hpp"
#include "posegen/ops.hpp"

namespace posegen {

namespace {

/// Criterion value between two equal-shape tensors; optionally writes
/// dValue/dA into grad (allocated by the caller, same shape).
double criterion_value(const TensorF& a, const TensorF& b, Criterion c,
                       TensorF* grad) {
  check(a.shape() == b.shape(), "criterion: shape mismatch");
  const double inv_m = 1.0 / static_cast<double>(a.size());
  double acc = 0.0;
  if (c == Criterion::kSquared) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = static_cast<double>(a[i]) - b[i];
      acc += d * d;
      if (grad != nullptr) (*grad)[i] = static_cast<float>(2.0 * d * inv_m);
    }
  } else {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = static_cast<double>(a[i]) - b[i];
      acc += std::abs(d);
      if (grad != nullptr)
        (*grad)[i] = static_cast<float>(
            (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) * inv_m);
    }
  }
  return acc * inv_m;
}

}  // namespace

std::string_view criterion_name(Criterion c) {
  return c == Criterion::kSquared ? "l2" : "l1";
}

Criterion criterion_for_step(std::uint64_t step, std::uint64_t total) {
  check(total > 0, "criterion_for_step: empty schedule");
  check(step < total, "criterion_for_step: step " + std::to_string(step) +
                          " outside schedule of " + std::to_string(total));
  return step < total / 2 ? Criterion::kSquared : Criterion::kAbsolute;
}

double PerceptualLoss::pair_loss(const TensorF& gt_img, const TensorF& out_img,
                                 Criterion c, TensorF* dimg) {
  const bool need_grad = dimg != nullptr;
  const auto taps_gt = fx_.features(gt_img, false);
  const auto taps_out = fx_.features(out_img, need_grad);

  double loss = 0.0;
  std::vector<TensorF> tap_grads;
  if (need_grad) tap_grads.resize(taps_out.size());
  for (std::size_t l = 0; l < taps_out.size(); ++l) {
    if (need_grad) tap_grads[l] = TensorF(taps_out[l].shape());
    loss += criterion_value(taps_out[l], taps_gt[l], c,
                            need_grad ? &tap_grads[l] : nullptr);
  }
  if (need_grad) *dimg += fx_.backward(tap_grads);
  return loss;
}

double PerceptualLoss::global_loss(const TensorF& gt, const TensorF& out,
                                   Criterion c, TensorF* dout) {
  check(gt.rank() == 4 && gt.dim(0) == 1 && out.rank() == 4 && out.dim(0) == 1,
        "global_loss: [1,3,H,W] samples expected");
  check(gt.shape() == out.shape(), "global_loss: shape mismatch");
  return pair_loss(gt, out, c, dout);
}

double PerceptualLoss::local_loss(const TensorF& gt, const TensorF& out,
                                  const DescriptorSet& ds, Criterion c,
                                  TensorF* dout) {
  check(gt.shape() == out.shape(), "local_loss: shape mismatch");
  check(gt.dim(2) == ds.level && gt.dim(3) == ds.level,
        "local_loss: descriptor set level does not match images");
  check(ds.size() > 0, "local_loss: empty descriptor set");

  double loss = 0.0;
  for (const auto& center : ds.centers) {
    const Rect r = crop_window(center.x, center.y, ds.level);
    const TensorF gt_crop = ops::crop(gt, 0, r.y0, r.x0, r.side);
    const TensorF out_crop = ops::crop(out, 0, r.y0, r.x0, r.side);
    if (dout != nullptr) {
      TensorF dcrop(out_crop.shape());
      loss += pair_loss(gt_crop, out_crop, c, &dcrop);
      ops::crop_add(*dout, 0, r.y0, r.x0, dcrop);
    } else {
      loss += pair_loss(gt_crop, out_crop, c, nullptr);
    }
  }
  return loss;
}

double PerceptualLoss::total_loss(const TensorF& gt, const TensorF& out,
                                  const DescriptorSet& ds, Criterion c,
                                  TensorF* dout, double global_weight,
                                  double local_weight) {
  double loss = 0.0;
  if (global_weight != 0.0) {
    if (dout != nullptr && global_weight != 1.0) {
      TensorF dg(out.shape());
      loss += global_weight * global_loss(gt, out, c, &dg);
      dg *= static_cast<float>(global_weight);
      *dout += dg;
    } else {
      loss += global_weight * global_loss(gt, out, c, dout);
    }
  }
  if (local_weight != 0.0) {
    if (dout != nullptr && local_weight != 1.0) {
      TensorF dl(out.shape());
      loss += local_weight * local_loss(gt, out, ds, c, &dl);
      dl *= static_cast<float>(local_weight);
      *dout += dl;
    } else {
      loss += local_weight * local_loss(gt, out, ds, c, dout);
    }
  }
  return loss;
}

}  // namespace posegen
