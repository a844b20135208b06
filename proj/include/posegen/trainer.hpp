#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "posegen/config.hpp"
#include "posegen/metrics.hpp"
#include "posegen/tensor.hpp"

namespace posegen {

struct TrainResult {
  std::filesystem::path final_checkpoint;
  std::filesystem::path log_path;
};

/// Runs the progressive training loop over the configured resolution
/// ladder: perceptual reconstruction (global + local terms, squared
/// criterion for the first half of each level's budget, absolute after),
/// Adam updates, growth between levels, and — when enabled at the final
/// level — the patch-discriminator objective in place of the local term.
/// Checkpoints land under <out_dir>/checkpoints; step records are appended
/// to <out_dir>/train_log.jsonl. A non-finite loss aborts after writing a
/// diagnostic snapshot. `resume` restarts mid-run from a saved checkpoint,
/// replaying the identical sample stream.
TrainResult train(const Config& cfg,
                  const std::optional<std::filesystem::path>& resume = {});

/// Scores a checkpoint over every ordered same-subject pair of a manifest.
/// The requested level must equal the checkpoint's level (a grown model has
/// no projections for coarser resolutions). ms_ssim is reported only at
/// resolutions of 176 px and above.
metrics::MetricsReport evaluate(const std::filesystem::path& checkpoint,
                                const std::filesystem::path& manifest,
                                std::size_t level);

/// One forward pass: reference appearance + target-pose keypoints -> image
/// at the checkpoint's level, values in [-1, 1]. Keypoint coordinates are
/// interpreted on a pose_h x pose_w grid; 0 means the reference image's
/// native size.
TensorF infer(const std::filesystem::path& checkpoint,
              const std::filesystem::path& reference_image,
              const std::filesystem::path& keypoints, std::size_t pose_h = 0,
              std::size_t pose_w = 0);

/// infer() mapped over an ordered keypoint-file sequence with a fixed
/// reference; stateless across frames, so identical keypoints give
/// identical frames.
std::vector<TensorF> infer_sequence(
    const std::filesystem::path& checkpoint,
    const std::filesystem::path& reference_image,
    const std::vector<std::filesystem::path>& keypoint_files,
    std::size_t pose_h = 0, std::size_t pose_w = 0);

}  // namespace posegen
