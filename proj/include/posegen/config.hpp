#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "posegen/vgg.hpp"

namespace posegen {

/// Training configuration. Parsed from a versioned JSON document; unknown
/// keys are rejected so typos surface instead of silently using defaults.
/// Environment variables override paths only: POSEGEN_MANIFEST,
/// POSEGEN_OUT_DIR, POSEGEN_EXTRACTOR_WEIGHTS.
struct Config {
  static constexpr int kVersion = 1;

  struct Data {
    std::string manifest;
    std::size_t epoch_range = 0;  // 0 = unlimited sampling
  };

  struct Train {
    std::vector<std::size_t> ladder = {64};
    std::size_t iterations_per_level = 700000;
    std::size_t batch = 8;  // at level 64; halves per doubling unless overridden
    std::map<std::size_t, std::size_t> batch_overrides;
    std::size_t checkpoint_every = 0;  // 0 = level boundaries only
    std::size_t log_every = 50;
  };

  struct Optimizer {
    double lr = 2e-4;
    double weight_decay = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  struct Loss {
    double lambda_adv = 0.1;
    double global_weight = 1.0;
    double local_weight = 1.0;
    std::string adversarial = "auto";  // auto | on | off
  };

  struct Pose {
    double sigma = 3.2;
  };

  struct Extractor {
    std::uint64_t seed = FeatureExtractor::kDefaultSeed;
    std::string weights;  // optional weight container path
  };

  struct Seeds {
    std::uint64_t model = 1;
    std::uint64_t data = 2;
  };

  Data data;
  Train train;
  Optimizer optimizer;
  Loss loss;
  Pose pose;
  std::map<std::size_t, std::size_t> descriptor_schedule = {
      {64, 18}, {128, 18}, {256, 31}, {512, 31}, {1024, 44}};
  Extractor extractor;
  Seeds seeds;
  std::string out_dir = "runs/default";

  static Config from_json(const nlohmann::json& j);
  /// Parses the file, applies environment overrides, validates.
  static Config load(const std::string& path);
  nlohmann::json to_json() const;

  void apply_env_overrides();
  void validate() const;

  std::size_t batch_for_level(std::size_t level) const;
  std::size_t descriptors_for_level(std::size_t level) const;
  /// Whether the adversarial objective replaces the local perceptual term at
  /// this level; only ever true at the final ladder level.
  bool adversarial_at(std::size_t level) const;
};

}  // namespace posegen
