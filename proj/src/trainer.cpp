#include "posegen/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <string>
#include <unordered_map>
#include <utility>

#include "posegen/autoencoder.hpp"
#include "posegen/checkpoint.hpp"
#include "posegen/dataset.hpp"
#include "posegen/descriptors.hpp"
#include "posegen/discriminator.hpp"
#include "posegen/error.hpp"
#include "posegen/heatmap.hpp"
#include "posegen/image.hpp"
#include "posegen/losses.hpp"
#include "posegen/ops.hpp"

namespace posegen {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kCheckpointKind = "posegen-checkpoint";
constexpr std::uint64_t kDiscSeedSalt = 0xD15Cu;

/// Decoded frames at a fixed level, cached FIFO under a memory budget so
/// small datasets never hit the PNG decoder twice.
class FrameCache {
 public:
  struct Frame {
    TensorF image;    // [3, level, level]
    KeypointSet kp;   // scaled to level x level
  };

  FrameCache(const DatasetManifest& manifest, std::size_t level)
      : manifest_(manifest), level_(level) {
    const std::size_t bytes_per_frame = 3 * level * level * sizeof(float);
    capacity_ = std::max<std::size_t>(
        8, (std::size_t{512} << 20) / bytes_per_frame);
  }

  const Frame& get(std::size_t record) {
    auto it = cache_.find(record);
    if (it != cache_.end()) return it->second;

    const ManifestRecord& rec = manifest_.records[record];
    std::size_t nh = 0, nw = 0;
    TensorF native = load_png(rec.image_path, &nh, &nw);
    TensorF img = (nh == level_ && nw == level_)
                      ? std::move(native)
                      : resize_bilinear(native, level_, level_);
    KeypointSet kp = load_keypoints(rec.keypoint_path, nh, nw);
    kp = scale_keypoints(kp, level_, level_);

    if (cache_.size() >= capacity_) {
      cache_.erase(order_.front());
      order_.pop_front();
    }
    order_.push_back(record);
    return cache_.emplace(record, Frame{std::move(img), std::move(kp)})
        .first->second;
  }

 private:
  const DatasetManifest& manifest_;
  std::size_t level_;
  std::size_t capacity_;
  std::unordered_map<std::size_t, Frame> cache_;
  std::deque<std::size_t> order_;
};

TensorF slice_sample(const TensorF& batch, std::size_t n) {
  const std::size_t chw = batch.dim(1) * batch.dim(2) * batch.dim(3);
  TensorF out({1, batch.dim(1), batch.dim(2), batch.dim(3)});
  std::copy(batch.storage().begin() + n * chw,
            batch.storage().begin() + (n + 1) * chw, out.storage().begin());
  return out;
}

void copy_into_sample(TensorF& batch, std::size_t n, const TensorF& sample) {
  const std::size_t chw = batch.size() / batch.dim(0);
  check(sample.size() == chw, "sample size does not match batch slot");
  std::copy(sample.storage().begin(), sample.storage().end(),
            batch.storage().begin() + n * chw);
}

TensorF pose_maps_for(const KeypointSet& kp_at_level, double sigma) {
  const KeypointSet kp32 = scale_keypoints(kp_at_level, kPoseGrid, kPoseGrid);
  return render_heatmaps(kp32, kPoseGrid, kPoseGrid, sigma);
}

void dump_module(Checkpoint& ck, json& adam_t,
                 const std::vector<nn::Param*>& params,
                 const std::vector<nn::Buffer*>& buffers) {
  for (const nn::Param* p : params) {
    ck.add(p->name, p->value);
    if (p->adam_t > 0) {
      ck.add("opt.m." + p->name, p->adam_m);
      ck.add("opt.v." + p->name, p->adam_v);
    }
    adam_t[p->name] = p->adam_t;
  }
  for (const nn::Buffer* b : buffers) ck.add(b->name, b->value);
}

void restore_module(const Checkpoint& ck,
                    const std::vector<nn::Param*>& params,
                    const std::vector<nn::Buffer*>& buffers) {
  const json& adam_t = ck.meta.contains("adam_t") ? ck.meta.at("adam_t")
                                                  : json::object();
  for (nn::Param* p : params) {
    const TensorF* t = ck.find(p->name);
    check(t != nullptr, "checkpoint is missing tensor " + p->name);
    check(t->shape() == p->value.shape(),
          "checkpoint tensor " + p->name + " has the wrong shape");
    p->value = *t;
    if (const TensorF* m = ck.find("opt.m." + p->name)) p->adam_m = *m;
    if (const TensorF* v = ck.find("opt.v." + p->name)) p->adam_v = *v;
    p->adam_t = adam_t.contains(p->name)
                    ? adam_t.at(p->name).get<std::int64_t>()
                    : 0;
  }
  for (nn::Buffer* b : buffers) {
    const TensorF* t = ck.find(b->name);
    check(t != nullptr, "checkpoint is missing buffer " + b->name);
    check(t->shape() == b->value.shape(),
          "checkpoint buffer " + b->name + " has the wrong shape");
    b->value = *t;
  }
}

struct LoadedCheckpoint {
  Checkpoint ck;
  Config cfg;
  std::size_t level = 0;
};

LoadedCheckpoint open_model_checkpoint(const fs::path& path) {
  LoadedCheckpoint lc;
  lc.ck = load_checkpoint(path);
  check(lc.ck.meta.value("kind", "") == kCheckpointKind,
        "not a model checkpoint: " + path.string());
  check(lc.ck.meta.contains("level") && lc.ck.meta.contains("config"),
        "model checkpoint is missing level/config metadata");
  lc.level = lc.ck.meta.at("level").get<std::size_t>();
  lc.cfg = Config::from_json(lc.ck.meta.at("config"));
  return lc;
}

FeatureExtractor make_extractor(const Config& cfg) {
  FeatureExtractor fx(cfg.extractor.seed);
  if (!cfg.extractor.weights.empty()) fx.load_weights(cfg.extractor.weights);
  return fx;
}

/// Shared state for one training run.
struct Engine {
  Config cfg;
  DatasetManifest manifest;
  PairSampler sampler;
  FeatureExtractor fx;
  PerceptualLoss ploss;
  Autoencoder model;
  std::optional<LocalDiscriminator> disc;
  nn::Adam opt_g, opt_d;
  std::ofstream log;
  fs::path ck_dir;
  fs::path log_path;

  std::uint64_t global_step = 0;
  std::uint64_t draws = 0;

  explicit Engine(const Config& c)
      : cfg(c),
        manifest(load_manifest(c.data.manifest)),
        sampler(manifest, c.seeds.data, c.data.epoch_range),
        fx(make_extractor(c)),
        ploss(fx),
        model(c.train.ladder.front(), c.seeds.model),
        opt_g(nn::AdamConfig{c.optimizer.lr, c.optimizer.beta1,
                             c.optimizer.beta2, c.optimizer.eps,
                             c.optimizer.weight_decay}),
        opt_d(nn::AdamConfig{c.optimizer.lr, c.optimizer.beta1,
                             c.optimizer.beta2, c.optimizer.eps,
                             c.optimizer.weight_decay}) {}

  Checkpoint snapshot(std::size_t level, std::uint64_t level_step) {
    Checkpoint ck;
    json adam_t = json::object();
    dump_module(ck, adam_t, model.params(), model.buffers());
    if (disc) dump_module(ck, adam_t, disc->params(), disc->buffers());
    ck.meta = json{{"kind", kCheckpointKind},
                   {"level", level},
                   {"level_step", level_step},
                   {"global_step", global_step},
                   {"draws", draws},
                   {"has_discriminator", disc.has_value()},
                   {"adam_t", adam_t},
                   {"config", cfg.to_json()}};
    return ck;
  }

  fs::path save(std::size_t level, std::uint64_t level_step,
                const std::string& stem) {
    const fs::path path = ck_dir / (stem + ".pgck");
    save_checkpoint(path, snapshot(level, level_step));
    return path;
  }

  void log_record(std::size_t level, std::uint64_t level_step, Criterion crit,
                  double loss_global, double loss_local, double loss_adv,
                  bool adversarial, double loss_d) {
    json rec{{"step", global_step},     {"level", level},
             {"level_step", level_step}, {"criterion", criterion_name(crit)},
             {"loss_global", loss_global}, {"loss_local", loss_local},
             {"loss_adv", loss_adv},    {"lr", cfg.optimizer.lr}};
    if (adversarial) rec["loss_d"] = loss_d;
    log << rec.dump() << '\n';
    log.flush();
  }
};

struct StepStats {
  double loss_global = 0.0;
  double loss_local = 0.0;
  double loss_adv = 0.0;
  double loss_d = 0.0;
  double total = 0.0;
};

StepStats run_step(Engine& e, FrameCache& cache, std::size_t level,
                   std::uint64_t step_in_level, std::uint64_t iters,
                   bool adversarial) {
  const std::size_t batch = e.cfg.batch_for_level(level);
  const std::size_t n_desc = e.cfg.descriptors_for_level(level);
  const Criterion crit = criterion_for_step(step_in_level, iters);

  TensorF refs({batch, 3, level, level});
  TensorF tgts({batch, 3, level, level});
  TensorF poses({batch, kKeypointCount, kPoseGrid, kPoseGrid});
  std::vector<DescriptorSet> dss(batch);

  for (std::size_t j = 0; j < batch; ++j) {
    const PairIndices pi = e.sampler.sample(e.draws++);
    {
      const FrameCache::Frame& rf = cache.get(pi.reference);
      copy_into_sample(refs, j, rf.image);
    }
    const FrameCache::Frame& tf = cache.get(pi.target);
    copy_into_sample(tgts, j, tf.image);
    TensorF hm = pose_maps_for(tf.kp, e.cfg.pose.sigma);
    copy_into_sample(poses, j, hm);
    dss[j] = build_descriptors(tf.kp, level, n_desc);
  }

  TensorF out = e.model.forward(refs, poses, /*train=*/true);

  StepStats stats;
  const double gw = e.cfg.loss.global_weight;
  const double lw = e.cfg.loss.local_weight;
  const double inv_b = 1.0 / static_cast<double>(batch);

  // Pair sources for the adversarial path: every descriptor window of every
  // sample, flattened in batch-major order.
  struct PairSource {
    std::size_t sample;
    Rect window;
  };
  std::vector<PairSource> sources;

  if (adversarial) {
    for (std::size_t j = 0; j < batch; ++j) {
      check(!dss[j].centers.empty(),
            "adversarial step needs at least one descriptor window "
            "(all keypoints missing in a sampled frame)");
      for (const DescriptorPoint& c : dss[j].centers) {
        sources.push_back({j, crop_window(c.x, c.y, level)});
      }
    }
    const std::size_t side = level / 8;
    const std::size_t crop_elems = 3 * side * side;
    const std::size_t n_pairs = sources.size();

    // One batched forward covering [real; fake] so a single set of caches
    // backs the discriminator update.
    TensorF pairs({2 * n_pairs, 6, side, side});
    for (std::size_t p = 0; p < n_pairs; ++p) {
      const auto& [sj, r] = sources[p];
      const TensorF ref_crop = ops::crop(refs, sj, r.y0, r.x0, r.side);
      const TensorF tgt_crop = ops::crop(tgts, sj, r.y0, r.x0, r.side);
      const TensorF out_crop = ops::crop(out, sj, r.y0, r.x0, r.side);
      float* real_slot = pairs.data() + p * 2 * crop_elems;
      float* fake_slot = pairs.data() + (n_pairs + p) * 2 * crop_elems;
      std::memcpy(real_slot, ref_crop.data(), crop_elems * sizeof(float));
      std::memcpy(real_slot + crop_elems, tgt_crop.data(),
                  crop_elems * sizeof(float));
      std::memcpy(fake_slot, ref_crop.data(), crop_elems * sizeof(float));
      std::memcpy(fake_slot + crop_elems, out_crop.data(),
                  crop_elems * sizeof(float));
    }

    // Discriminator update.
    nn::Adam::zero_grad(e.disc->params());
    const std::vector<double> p_all = e.disc->forward(pairs, /*train=*/true);
    std::vector<double> p_real(p_all.begin(), p_all.begin() + n_pairs);
    std::vector<double> p_fake(p_all.begin() + n_pairs, p_all.end());
    stats.loss_d = LocalDiscriminator::d_loss(p_real, p_fake);
    std::vector<double> dreal, dfake;
    LocalDiscriminator::d_loss_grads(p_real, p_fake, dreal, dfake);
    std::vector<double> dp(2 * n_pairs);
    std::copy(dreal.begin(), dreal.end(), dp.begin());
    std::copy(dfake.begin(), dfake.end(), dp.begin() + n_pairs);
    e.disc->backward(dp);
    e.opt_d.step(e.disc->params());

    // Generator update against the refreshed discriminator: global
    // perceptual term plus lambda_adv * mean(-ln p_fake).
    nn::Adam::zero_grad(e.model.params());
    TensorF dout(out.shape());
    dout.zero();
    for (std::size_t j = 0; j < batch; ++j) {
      const TensorF tgt_j = slice_sample(tgts, j);
      const TensorF out_j = slice_sample(out, j);
      TensorF dg(out_j.shape());
      dg.zero();
      const double g = e.ploss.global_loss(tgt_j, out_j, crit, &dg);
      stats.loss_global += g * inv_b;
      const std::size_t chw = 3 * level * level;
      for (std::size_t i = 0; i < chw; ++i) {
        dout.storage()[j * chw + i] +=
            static_cast<float>(gw * inv_b) * dg.storage()[i];
      }
    }

    TensorF fake_pairs({n_pairs, 6, side, side});
    std::memcpy(fake_pairs.data(), pairs.data() + n_pairs * 6 * side * side,
                n_pairs * 6 * side * side * sizeof(float));
    e.disc->set_trainable(false);
    const std::vector<double> p_fake2 = e.disc->forward(fake_pairs, true);
    stats.loss_adv = LocalDiscriminator::g_adv(p_fake2);
    std::vector<double> dpf = LocalDiscriminator::g_adv_grad(p_fake2);
    for (double& v : dpf) v *= e.cfg.loss.lambda_adv;
    const TensorF dpairs = e.disc->backward(dpf);
    e.disc->set_trainable(true);
    nn::Adam::zero_grad(e.disc->params());  // drop grads from the G pass

    TensorF dcrop({std::size_t{1}, 3, side, side});
    for (std::size_t p = 0; p < n_pairs; ++p) {
      // Channels 3..5 belong to the generated crop; 0..2 condition on the
      // reference and carry no generator gradient.
      std::memcpy(dcrop.data(), dpairs.data() + (p * 6 + 3) * side * side,
                  crop_elems * sizeof(float));
      ops::crop_add(dout, sources[p].sample, sources[p].window.y0,
                    sources[p].window.x0, dcrop);
    }

    e.model.backward(dout);
    e.opt_g.step(e.model.params());
    stats.total = gw * stats.loss_global +
                  e.cfg.loss.lambda_adv * stats.loss_adv;
    return stats;
  }

  // Pure perceptual step: global + local terms.
  nn::Adam::zero_grad(e.model.params());
  TensorF dout(out.shape());
  dout.zero();
  for (std::size_t j = 0; j < batch; ++j) {
    const TensorF tgt_j = slice_sample(tgts, j);
    const TensorF out_j = slice_sample(out, j);
    TensorF dg(out_j.shape()), dl(out_j.shape());
    dg.zero();
    dl.zero();
    const double g = e.ploss.global_loss(tgt_j, out_j, crit, &dg);
    double l = 0.0;
    if (!dss[j].centers.empty()) {
      l = e.ploss.local_loss(tgt_j, out_j, dss[j], crit, &dl);
    }
    stats.loss_global += g * inv_b;
    stats.loss_local += l * inv_b;
    const std::size_t chw = 3 * level * level;
    for (std::size_t i = 0; i < chw; ++i) {
      dout.storage()[j * chw + i] +=
          static_cast<float>(gw * inv_b) * dg.storage()[i] +
          static_cast<float>(lw * inv_b) * dl.storage()[i];
    }
  }
  e.model.backward(dout);
  e.opt_g.step(e.model.params());
  stats.total = gw * stats.loss_global + lw * stats.loss_local;
  return stats;
}

}  // namespace

TrainResult train(const Config& cfg_in,
                  const std::optional<fs::path>& resume) {
  Config cfg = cfg_in;
  cfg.validate();

  Engine e(cfg);
  e.ck_dir = fs::path(cfg.out_dir) / "checkpoints";
  fs::create_directories(e.ck_dir);
  e.log_path = fs::path(cfg.out_dir) / "train_log.jsonl";

  std::size_t start_level_idx = 0;
  std::uint64_t start_step = 0;

  if (resume) {
    LoadedCheckpoint lc = open_model_checkpoint(*resume);
    const auto& ladder = cfg.train.ladder;
    const auto it = std::find(ladder.begin(), ladder.end(), lc.level);
    check(it != ladder.end(),
          "resume checkpoint level " + std::to_string(lc.level) +
              " is not in the configured ladder");
    start_level_idx = static_cast<std::size_t>(it - ladder.begin());
    start_step = lc.ck.meta.at("level_step").get<std::uint64_t>();
    e.global_step = lc.ck.meta.at("global_step").get<std::uint64_t>();
    e.draws = lc.ck.meta.at("draws").get<std::uint64_t>();

    if (lc.level != e.model.level()) {
      e.model = Autoencoder(lc.level, cfg.seeds.model);
    }
    if (lc.ck.meta.value("has_discriminator", false)) {
      e.disc.emplace(Rng::mix(cfg.seeds.model, kDiscSeedSalt));
      restore_module(lc.ck, e.disc->params(), e.disc->buffers());
    }
    restore_module(lc.ck, e.model.params(), e.model.buffers());
  }

  e.log.open(e.log_path, resume ? std::ios::app : std::ios::trunc);
  check(e.log.good(), "cannot open training log: " + e.log_path.string());
  {
    std::ofstream cfg_out(fs::path(cfg.out_dir) / "config.json");
    cfg_out << cfg.to_json().dump(2) << '\n';
  }

  const std::uint64_t iters = cfg.train.iterations_per_level;
  fs::path last_ck;

  for (std::size_t li = start_level_idx; li < cfg.train.ladder.size(); ++li) {
    const std::size_t level = cfg.train.ladder[li];
    const bool adversarial = cfg.adversarial_at(level);
    if (adversarial && !e.disc) {
      e.disc.emplace(Rng::mix(cfg.seeds.model, kDiscSeedSalt));
    }
    FrameCache cache(e.manifest, level);

    const std::uint64_t first = li == start_level_idx ? start_step : 0;
    for (std::uint64_t step = first; step < iters; ++step) {
      const StepStats s =
          run_step(e, cache, level, step, iters, adversarial);
      e.global_step += 1;

      if (!std::isfinite(s.total)) {
        const fs::path diag = e.save(
            level, step + 1,
            "diag_nonfinite_level" + std::to_string(level) + "_step" +
                std::to_string(step + 1));
        throw Error("non-finite loss at level " + std::to_string(level) +
                    " step " + std::to_string(step + 1) +
                    "; diagnostic snapshot: " + diag.string());
      }

      const bool at_switch = step == iters / 2;
      if (step % std::max<std::uint64_t>(cfg.train.log_every, 1) == 0 ||
          at_switch || step + 1 == iters) {
        e.log_record(level, step + 1, criterion_for_step(step, iters),
                     s.loss_global, s.loss_local, s.loss_adv, adversarial,
                     s.loss_d);
      }
      if (cfg.train.checkpoint_every > 0 &&
          (step + 1) % cfg.train.checkpoint_every == 0 && step + 1 < iters) {
        last_ck = e.save(level, step + 1,
                         "ck_level" + std::to_string(level) + "_step" +
                             std::to_string(step + 1));
      }
    }

    last_ck = e.save(level, iters,
                     "ck_level" + std::to_string(level) + "_step" +
                         std::to_string(iters));
    if (li + 1 < cfg.train.ladder.size()) {
      e.model.grow(cfg.seeds.model);
    }
  }

  return TrainResult{last_ck, e.log_path};
}

metrics::MetricsReport evaluate(const fs::path& checkpoint,
                                const fs::path& manifest_path,
                                std::size_t level) {
  LoadedCheckpoint lc = open_model_checkpoint(checkpoint);
  check(lc.level == level,
        "checkpoint level (" + std::to_string(lc.level) +
            ") does not match the requested level (" + std::to_string(level) +
            ")");

  Autoencoder model(level, lc.cfg.seeds.model);
  restore_module(lc.ck, model.params(), model.buffers());
  FeatureExtractor fx = make_extractor(lc.cfg);

  const DatasetManifest manifest = load_manifest(manifest_path);
  const PairSampler sampler(manifest, 0, 0);
  const std::vector<PairIndices>& pairs = sampler.all_pairs();
  check(!pairs.empty(), "manifest yields no evaluation pairs");

  metrics::MetricsReport report;
  report.n_pairs = pairs.size();
  report.has_ms_ssim = level >= 176;
  std::size_t local_count = 0;

  for (const PairIndices& pi : pairs) {
    const LoadedPair lp = load_pair(manifest, pi, level);
    TensorF ref4 = lp.reference;
    ref4.reshape({1, 3, level, level});
    TensorF hm = pose_maps_for(lp.target_keypoints, lc.cfg.pose.sigma);
    hm.reshape({1, kKeypointCount, kPoseGrid, kPoseGrid});

    TensorF out = model.forward(ref4, hm, /*train=*/false);
    out.reshape({3, level, level});

    report.ssim += metrics::ssim(out, lp.target);
    if (report.has_ms_ssim) report.ms_ssim += metrics::ms_ssim(out, lp.target);
    report.perceptual_distance +=
        metrics::perceptual_distance(out, lp.target, fx);
    const DescriptorSet ds = build_descriptors(
        lp.target_keypoints, level, lc.cfg.descriptors_for_level(level));
    if (!ds.centers.empty()) {
      report.local_ssim += metrics::local_ssim(out, lp.target, ds);
      local_count += 1;
    }
  }

  const double inv = 1.0 / static_cast<double>(pairs.size());
  report.ssim *= inv;
  report.ms_ssim *= inv;
  report.perceptual_distance *= inv;
  if (local_count > 0) {
    report.local_ssim /= static_cast<double>(local_count);
  }
  return report;
}

TensorF infer(const fs::path& checkpoint, const fs::path& reference_image,
              const fs::path& keypoints, std::size_t pose_h,
              std::size_t pose_w) {
  LoadedCheckpoint lc = open_model_checkpoint(checkpoint);
  const std::size_t level = lc.level;

  Autoencoder model(level, lc.cfg.seeds.model);
  restore_module(lc.ck, model.params(), model.buffers());

  std::size_t nh = 0, nw = 0;
  TensorF native = load_png(reference_image, &nh, &nw);
  TensorF ref = (nh == level && nw == level)
                    ? std::move(native)
                    : resize_bilinear(native, level, level);
  ref.reshape({1, 3, level, level});

  const std::size_t grid_h = pose_h == 0 ? nh : pose_h;
  const std::size_t grid_w = pose_w == 0 ? nw : pose_w;
  KeypointSet kp = load_keypoints(keypoints, grid_h, grid_w);
  kp = scale_keypoints(kp, kPoseGrid, kPoseGrid);
  TensorF hm = render_heatmaps(kp, kPoseGrid, kPoseGrid, lc.cfg.pose.sigma);
  hm.reshape({1, kKeypointCount, kPoseGrid, kPoseGrid});

  TensorF out = model.forward(ref, hm, /*train=*/false);
  out.reshape({3, level, level});
  return out;
}

std::vector<TensorF> infer_sequence(
    const fs::path& checkpoint, const fs::path& reference_image,
    const std::vector<fs::path>& keypoint_files, std::size_t pose_h,
    std::size_t pose_w) {
  if (keypoint_files.empty()) return {};

  LoadedCheckpoint lc = open_model_checkpoint(checkpoint);
  const std::size_t level = lc.level;
  Autoencoder model(level, lc.cfg.seeds.model);
  restore_module(lc.ck, model.params(), model.buffers());

  std::size_t nh = 0, nw = 0;
  TensorF native = load_png(reference_image, &nh, &nw);
  TensorF ref = (nh == level && nw == level)
                    ? std::move(native)
                    : resize_bilinear(native, level, level);
  ref.reshape({1, 3, level, level});

  std::vector<TensorF> frames;
  frames.reserve(keypoint_files.size());
  for (const fs::path& kp_path : keypoint_files) {
    const std::size_t grid_h = pose_h == 0 ? nh : pose_h;
    const std::size_t grid_w = pose_w == 0 ? nw : pose_w;
    KeypointSet kp = load_keypoints(kp_path, grid_h, grid_w);
    kp = scale_keypoints(kp, kPoseGrid, kPoseGrid);
    TensorF hm = render_heatmaps(kp, kPoseGrid, kPoseGrid, lc.cfg.pose.sigma);
    hm.reshape({1, kKeypointCount, kPoseGrid, kPoseGrid});
    TensorF out = model.forward(ref, hm, /*train=*/false);
    out.reshape({3, level, level});
    frames.push_back(std::move(out));
  }
  return frames;
}

}  // namespace posegen
