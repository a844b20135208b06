#pragma once

#include <cstddef>
#include <filesystem>

#include "posegen/tensor.hpp"

namespace posegen {

/// Valid training/inference resolutions.
inline bool is_valid_level(std::size_t level) {
  return level == 64 || level == 128 || level == 256 || level == 512 ||
         level == 1024;
}

/// Reads an 8-bit PNG (RGB; palette/gray/alpha variants are normalized to
/// RGB) into a [3, H, W] tensor with values mapped affinely to [-1, 1].
/// Optionally reports the file's native dimensions.
TensorF load_png(const std::filesystem::path& path,
                 std::size_t* native_h = nullptr,
                 std::size_t* native_w = nullptr);

/// Writes a [3, H, W] tensor in [-1, 1] as an 8-bit RGB PNG. Values are
/// clamped, then quantized with round-half-away mapping so that
/// save(load(f)) reproduces the original 8-bit samples exactly.
void save_png(const std::filesystem::path& path, const TensorF& img);

/// Writes a single-channel [H, W] tensor in [0, 1] as an 8-bit grayscale PNG.
void save_png_gray(const std::filesystem::path& path, const TensorF& map);

/// Antialiased bilinear (triangle-filter) resampling of a [C, H, W] tensor.
/// When downscaling, the filter support widens by the scale factor so the
/// result is a proper low-pass average rather than point sampling.
TensorF resize_bilinear(const TensorF& img, std::size_t out_h,
                        std::size_t out_w);

/// Decodes a PNG and resizes it to level x level. The standard entry point
/// for dataset and inference image loading.
TensorF decode_image(const std::filesystem::path& path, std::size_t level);

}  // namespace posegen
