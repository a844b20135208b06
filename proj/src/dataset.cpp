#include "posegen/dataset.hpp"

#include <fstream>
#include <map>

#include "json.hpp"
#include "posegen/error.hpp"
#include "posegen/image.hpp"
#include "posegen/rng.hpp"

namespace posegen {

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  check(in.good(), "cannot open manifest: " + path.string());

  DatasetManifest m;
  m.root = path.has_parent_path() ? path.parent_path()
                                  : std::filesystem::path(".");

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("manifest " + path.string() + " line " +
                  std::to_string(lineno) + ": " + e.what());
    }
    for (const char* field : {"subject_id", "frame_id", "image", "keypoints"})
      check(rec.contains(field) && rec[field].is_string(),
            "manifest " + path.string() + " line " + std::to_string(lineno) +
                ": missing string field '" + field + "'");
    ManifestRecord r;
    r.subject_id = rec["subject_id"].get<std::string>();
    r.frame_id = rec["frame_id"].get<std::string>();
    r.image_path = m.root / rec["image"].get<std::string>();
    r.keypoint_path = m.root / rec["keypoints"].get<std::string>();
    check(std::filesystem::exists(r.image_path),
          "manifest references a nonexistent image: " + r.image_path.string());
    check(std::filesystem::exists(r.keypoint_path),
          "manifest references a nonexistent keypoint file: " +
              r.keypoint_path.string());
    m.records.push_back(std::move(r));
  }
  check(!m.records.empty(), "manifest " + path.string() + " has no records");

  std::map<std::string, std::size_t> frames_per_subject;
  for (const auto& r : m.records) ++frames_per_subject[r.subject_id];
  for (const auto& [subject, count] : frames_per_subject)
    check(count >= 2, "subject '" + subject +
                          "' has a single frame; no pair can be formed");
  return m;
}

PairSampler::PairSampler(const DatasetManifest& manifest, std::uint64_t seed,
                         std::uint64_t epoch_range)
    : seed_(seed), epoch_range_(epoch_range) {
  // Group record indices by subject, then enumerate ordered pairs with
  // distinct frames. Manifest order keeps the enumeration stable.
  std::map<std::string, std::vector<std::size_t>> by_subject;
  for (std::size_t i = 0; i < manifest.records.size(); ++i)
    by_subject[manifest.records[i].subject_id].push_back(i);
  for (const auto& [subject, idx] : by_subject)
    for (std::size_t a : idx)
      for (std::size_t b : idx)
        if (a != b) pairs_.push_back({a, b});
  check(!pairs_.empty(), "no same-subject pairs in manifest");
}

PairIndices PairSampler::sample(std::uint64_t index) const {
  check(epoch_range_ == 0 || index < epoch_range_,
        "pair draw index " + std::to_string(index) +
            " outside the configured epoch range " +
            std::to_string(epoch_range_));
  Rng rng(Rng::mix(seed_, index));
  return pairs_[rng.below(pairs_.size())];
}

LoadedPair load_pair(const DatasetManifest& manifest, PairIndices pair,
                     std::size_t level) {
  check(pair.reference < manifest.size() && pair.target < manifest.size(),
        "load_pair: record index out of range");
  const ManifestRecord& ref = manifest.records[pair.reference];
  const ManifestRecord& tgt = manifest.records[pair.target];
  check(ref.subject_id == tgt.subject_id,
        "load_pair: cross-subject pair requested");

  LoadedPair out;
  out.subject_id = ref.subject_id;
  out.reference = decode_image(ref.image_path, level);

  std::size_t native_h = 0, native_w = 0;
  TensorF target_native = load_png(tgt.image_path, &native_h, &native_w);
  out.target = resize_bilinear(target_native, level, level);

  KeypointSet kp = load_keypoints(tgt.keypoint_path, native_h, native_w);
  out.target_keypoints = scale_keypoints(kp, level, level);
  return out;
}

}  // namespace posegen
