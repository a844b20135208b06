#include "posegen/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>

#include "posegen/error.hpp"
#include "posegen/image.hpp"

namespace posegen {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  check(j.is_object(), where + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    check(known, "unknown key \"" + item.key() + "\" in " + where);
  }
}

bool is_nonneg_int(const json& v) {
  return v.is_number_unsigned() ||
         (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

double get_num(const json& j, const std::string& key, const std::string& where,
               double fallback) {
  if (!j.contains(key)) return fallback;
  check(j.at(key).is_number(), where + "." + key + " must be a number");
  return j.at(key).get<double>();
}

std::size_t get_count(const json& j, const std::string& key,
                      const std::string& where, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  check(is_nonneg_int(j.at(key)),
        where + "." + key + " must be a non-negative integer");
  return j.at(key).get<std::size_t>();
}

std::string get_str(const json& j, const std::string& key,
                    const std::string& where, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  check(j.at(key).is_string(), where + "." + key + " must be a string");
  return j.at(key).get<std::string>();
}

std::size_t parse_level_key(const std::string& key, const std::string& where) {
  check(!key.empty(), where + " has an empty level key");
  for (char ch : key) {
    check(std::isdigit(static_cast<unsigned char>(ch)) != 0,
          where + " level key \"" + key + "\" is not a number");
  }
  return static_cast<std::size_t>(std::stoull(key));
}

std::map<std::size_t, std::size_t> get_level_map(const json& j,
                                                 const std::string& where) {
  check(j.is_object(), where + " must be an object mapping level to count");
  std::map<std::size_t, std::size_t> out;
  for (const auto& item : j.items()) {
    const std::size_t level = parse_level_key(item.key(), where);
    check(is_nonneg_int(item.value()),
          where + "[" + item.key() + "] must be a non-negative integer");
    out[level] = item.value().get<std::size_t>();
  }
  return out;
}

}  // namespace

Config Config::from_json(const json& j) {
  Config c;
  check_keys(j, "config",
             {"version", "data", "train", "optimizer", "loss", "pose",
              "descriptors", "extractor", "seeds", "out_dir"});
  if (j.contains("version")) {
    check(j.at("version").is_number_integer() &&
              j.at("version").get<int>() == kVersion,
          "unsupported config version (expected " + std::to_string(kVersion) +
              ")");
  }

  if (j.contains("data")) {
    const json& d = j.at("data");
    check_keys(d, "data", {"manifest", "epoch_range"});
    c.data.manifest = get_str(d, "manifest", "data", c.data.manifest);
    c.data.epoch_range = get_count(d, "epoch_range", "data", c.data.epoch_range);
  }

  if (j.contains("train")) {
    const json& t = j.at("train");
    check_keys(t, "train",
               {"ladder", "iterations_per_level", "batch", "batch_overrides",
                "checkpoint_every", "log_every"});
    if (t.contains("ladder")) {
      check(t.at("ladder").is_array(), "train.ladder must be an array");
      c.train.ladder.clear();
      for (const json& v : t.at("ladder")) {
        check(is_nonneg_int(v),
              "train.ladder entries must be non-negative integers");
        c.train.ladder.push_back(v.get<std::size_t>());
      }
    }
    c.train.iterations_per_level = get_count(t, "iterations_per_level", "train",
                                             c.train.iterations_per_level);
    c.train.batch = get_count(t, "batch", "train", c.train.batch);
    if (t.contains("batch_overrides")) {
      c.train.batch_overrides =
          get_level_map(t.at("batch_overrides"), "train.batch_overrides");
    }
    c.train.checkpoint_every =
        get_count(t, "checkpoint_every", "train", c.train.checkpoint_every);
    c.train.log_every = get_count(t, "log_every", "train", c.train.log_every);
  }

  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    check_keys(o, "optimizer", {"lr", "weight_decay", "beta1", "beta2", "eps"});
    c.optimizer.lr = get_num(o, "lr", "optimizer", c.optimizer.lr);
    c.optimizer.weight_decay =
        get_num(o, "weight_decay", "optimizer", c.optimizer.weight_decay);
    c.optimizer.beta1 = get_num(o, "beta1", "optimizer", c.optimizer.beta1);
    c.optimizer.beta2 = get_num(o, "beta2", "optimizer", c.optimizer.beta2);
    c.optimizer.eps = get_num(o, "eps", "optimizer", c.optimizer.eps);
  }

  if (j.contains("loss")) {
    const json& l = j.at("loss");
    check_keys(l, "loss",
               {"lambda_adv", "global_weight", "local_weight", "adversarial"});
    c.loss.lambda_adv = get_num(l, "lambda_adv", "loss", c.loss.lambda_adv);
    c.loss.global_weight =
        get_num(l, "global_weight", "loss", c.loss.global_weight);
    c.loss.local_weight =
        get_num(l, "local_weight", "loss", c.loss.local_weight);
    c.loss.adversarial = get_str(l, "adversarial", "loss", c.loss.adversarial);
  }

  if (j.contains("pose")) {
    const json& p = j.at("pose");
    check_keys(p, "pose", {"sigma"});
    c.pose.sigma = get_num(p, "sigma", "pose", c.pose.sigma);
  }

  if (j.contains("descriptors")) {
    c.descriptor_schedule = get_level_map(j.at("descriptors"), "descriptors");
  }

  if (j.contains("extractor")) {
    const json& e = j.at("extractor");
    check_keys(e, "extractor", {"seed", "weights"});
    c.extractor.seed = get_count(e, "seed", "extractor", c.extractor.seed);
    c.extractor.weights =
        get_str(e, "weights", "extractor", c.extractor.weights);
  }

  if (j.contains("seeds")) {
    const json& s = j.at("seeds");
    check_keys(s, "seeds", {"model", "data"});
    c.seeds.model = get_count(s, "model", "seeds", c.seeds.model);
    c.seeds.data = get_count(s, "data", "seeds", c.seeds.data);
  }

  c.out_dir = get_str(j, "out_dir", "config", c.out_dir);
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  check(in.good(), "cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("config parse error in " + path + ": " + e.what());
  }
  Config c = from_json(j);
  c.apply_env_overrides();
  c.validate();
  return c;
}

void Config::apply_env_overrides() {
  if (const char* v = std::getenv("POSEGEN_MANIFEST")) data.manifest = v;
  if (const char* v = std::getenv("POSEGEN_OUT_DIR")) out_dir = v;
  if (const char* v = std::getenv("POSEGEN_EXTRACTOR_WEIGHTS")) {
    extractor.weights = v;
  }
}

void Config::validate() const {
  check(!data.manifest.empty(), "config is missing data.manifest");
  check(!train.ladder.empty(), "train.ladder must not be empty");
  check(train.ladder.front() == 64, "resolution ladder must start at 64");
  for (std::size_t i = 0; i < train.ladder.size(); ++i) {
    check(is_valid_level(train.ladder[i]),
          "ladder level " + std::to_string(train.ladder[i]) +
              " is not a power of two in [64, 1024]");
    if (i > 0) {
      check(train.ladder[i] == train.ladder[i - 1] * 2,
            "ladder levels must double at each step");
    }
  }
  check(train.iterations_per_level >= 1,
        "train.iterations_per_level must be at least 1");
  check(train.batch >= 1, "train.batch must be at least 1");
  for (const auto& [level, n] : train.batch_overrides) {
    check(is_valid_level(level), "batch override level " +
                                     std::to_string(level) +
                                     " is not a valid resolution");
    check(n >= 1, "batch override at level " + std::to_string(level) +
                      " must be at least 1");
  }

  check(optimizer.lr > 0.0, "optimizer.lr must be positive");
  check(optimizer.eps > 0.0, "optimizer.eps must be positive");
  check(optimizer.weight_decay >= 0.0,
        "optimizer.weight_decay must be non-negative");
  check(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0,
        "optimizer.beta1 must lie in [0, 1)");
  check(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0,
        "optimizer.beta2 must lie in [0, 1)");

  check(loss.lambda_adv >= 0.0, "loss.lambda_adv must be non-negative");
  check(loss.global_weight >= 0.0, "loss.global_weight must be non-negative");
  check(loss.local_weight >= 0.0, "loss.local_weight must be non-negative");
  check(loss.adversarial == "auto" || loss.adversarial == "on" ||
            loss.adversarial == "off",
        "loss.adversarial must be one of auto, on, off");
  check(loss.adversarial != "on" || train.ladder.back() == 1024,
        "loss.adversarial \"on\" requires the ladder to end at 1024 (the "
        "patch discriminator operates on 128-px crops, level/8 at 1024)");

  check(pose.sigma > 0.0, "pose.sigma must be positive");

  for (std::size_t level : train.ladder) {
    const auto it = descriptor_schedule.find(level);
    check(it != descriptor_schedule.end(),
          "descriptor schedule has no entry for level " +
              std::to_string(level));
    const std::set<std::size_t> supported = {18, 31, 44};
    check(supported.count(it->second) == 1,
          "descriptor count at level " + std::to_string(level) +
              " must be one of 18, 31, 44");
  }
  check(!out_dir.empty(), "out_dir must not be empty");
}

std::size_t Config::batch_for_level(std::size_t level) const {
  const auto it = train.batch_overrides.find(level);
  if (it != train.batch_overrides.end()) return it->second;
  std::size_t b = train.batch;
  for (std::size_t s = 64; s < level; s *= 2) b /= 2;
  return b == 0 ? 1 : b;
}

std::size_t Config::descriptors_for_level(std::size_t level) const {
  const auto it = descriptor_schedule.find(level);
  check(it != descriptor_schedule.end(),
        "descriptor schedule has no entry for level " + std::to_string(level));
  return it->second;
}

bool Config::adversarial_at(std::size_t level) const {
  if (level != train.ladder.back()) return false;
  if (loss.adversarial == "off") return false;
  if (loss.adversarial == "on") return true;
  return level == 1024;
}

nlohmann::json Config::to_json() const {
  json batch_overrides = json::object();
  for (const auto& [level, n] : train.batch_overrides) {
    batch_overrides[std::to_string(level)] = n;
  }
  json schedule = json::object();
  for (const auto& [level, n] : descriptor_schedule) {
    schedule[std::to_string(level)] = n;
  }
  return json{
      {"version", kVersion},
      {"data",
       {{"manifest", data.manifest}, {"epoch_range", data.epoch_range}}},
      {"train",
       {{"ladder", train.ladder},
        {"iterations_per_level", train.iterations_per_level},
        {"batch", train.batch},
        {"batch_overrides", batch_overrides},
        {"checkpoint_every", train.checkpoint_every},
        {"log_every", train.log_every}}},
      {"optimizer",
       {{"lr", optimizer.lr},
        {"weight_decay", optimizer.weight_decay},
        {"beta1", optimizer.beta1},
        {"beta2", optimizer.beta2},
        {"eps", optimizer.eps}}},
      {"loss",
       {{"lambda_adv", loss.lambda_adv},
        {"global_weight", loss.global_weight},
        {"local_weight", loss.local_weight},
        {"adversarial", loss.adversarial}}},
      {"pose", {{"sigma", pose.sigma}}},
      {"descriptors", schedule},
      {"extractor",
       {{"seed", extractor.seed}, {"weights", extractor.weights}}},
      {"seeds", {{"model", seeds.model}, {"data", seeds.data}}},
      {"out_dir", out_dir}};
}

}  // namespace posegen
