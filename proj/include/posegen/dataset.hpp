#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "posegen/keypoints.hpp"
#include "posegen/tensor.hpp"

namespace posegen {

struct ManifestRecord {
  std::string subject_id;
  std::string frame_id;
  std::filesystem::path image_path;     // resolved against the manifest dir
  std::filesystem::path keypoint_path;  // resolved against the manifest dir
};

/// A validated dataset listing: every referenced file exists and every
/// subject has at least two frames (otherwise no pair could be formed).
struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestRecord> records;

  std::size_t size() const { return records.size(); }
};

/// Parses a manifest: one JSON object per line with fields
/// {subject_id, frame_id, image, keypoints}; image/keypoints are paths
/// relative to the manifest file's directory. Throws on structural errors,
/// missing files, or single-frame subjects.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Indices into DatasetManifest::records for one (reference, target) draw.
struct PairIndices {
  std::size_t reference = 0;
  std::size_t target = 0;
};

/// Deterministic sampler over ordered same-subject frame pairs. Draw i is a
/// pure function of (seed, i), so training needs no sampler state in
/// checkpoints: resuming at step s replays draws from index s onward.
class PairSampler {
 public:
  /// epoch_range limits the valid draw indices; 0 means unlimited.
  PairSampler(const DatasetManifest& manifest, std::uint64_t seed,
              std::uint64_t epoch_range = 0);

  PairIndices sample(std::uint64_t index) const;

  /// All ordered same-subject pairs (reference frame != target frame),
  /// in manifest order. Exposed for exhaustive-enumeration tests and for
  /// evaluation over every pair.
  const std::vector<PairIndices>& all_pairs() const { return pairs_; }

 private:
  std::vector<PairIndices> pairs_;
  std::uint64_t seed_;
  std::uint64_t epoch_range_;
};

/// A decoded training/evaluation pair at a fixed resolution.
struct LoadedPair {
  TensorF reference;             // [3, level, level]
  TensorF target;                // [3, level, level]
  KeypointSet target_keypoints;  // scaled to level x level
  std::string subject_id;
};

/// Decodes both frames at the given level and scales the target keypoints
/// (validated against the target image's native size) to match.
LoadedPair load_pair(const DatasetManifest& manifest, PairIndices pair,
                     std::size_t level);

}  // namespace posegen
