#include "posegen/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "posegen/error.hpp"

namespace posegen {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
  (void)png;
  throw Error(std::string("png: ") + msg);
}

void png_warning_handler(png_structp, png_const_charp) {}

/// Triangle-filter weights for one output coordinate. PIL-style: the filter
/// support scales with the downscale ratio, and weights are renormalized at
/// the borders.
struct FilterRow {
  std::size_t first;
  std::vector<double> weights;
};

std::vector<FilterRow> build_filter(std::size_t in_size, std::size_t out_size) {
  const double scale = static_cast<double>(in_size) / out_size;
  const double filter_scale = std::max(scale, 1.0);
  const double support = filter_scale;  // triangle filter has support 1
  std::vector<FilterRow> rows(out_size);
  for (std::size_t i = 0; i < out_size; ++i) {
    const double center = (i + 0.5) * scale;
    auto lo = static_cast<long>(std::floor(center - support));
    auto hi = static_cast<long>(std::ceil(center + support));
    lo = std::max<long>(lo, 0);
    hi = std::min<long>(hi, static_cast<long>(in_size));
    check(hi > lo, "resize: degenerate filter window");
    FilterRow row;
    row.first = static_cast<std::size_t>(lo);
    row.weights.resize(static_cast<std::size_t>(hi - lo));
    double total = 0.0;
    for (long j = lo; j < hi; ++j) {
      const double x = (j + 0.5 - center) / filter_scale;
      const double w = std::abs(x) < 1.0 ? 1.0 - std::abs(x) : 0.0;
      row.weights[static_cast<std::size_t>(j - lo)] = w;
      total += w;
    }
    check(total > 0.0, "resize: zero filter weight");
    for (double& w : row.weights) w /= total;
    rows[i] = std::move(row);
  }
  return rows;
}

}  // namespace

TensorF load_png(const std::filesystem::path& path, std::size_t* native_h,
                 std::size_t* native_w) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  check(file != nullptr, "cannot open image file: " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           png_error_handler,
                                           png_warning_handler);
  check(png != nullptr, "png: allocation failure");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("png: allocation failure");
  }

  TensorF out;
  std::size_t H = 0, W = 0;
  try {
    png_init_io(png, file.get());
    png_read_info(png, info);

    W = png_get_image_width(png, info);
    H = png_get_image_height(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    check(bit_depth <= 16, "png: unsupported bit depth");

    // Normalize every input variant to 8-bit RGB.
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
      png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY ||
        color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
      png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    check(png_get_channels(png, info) == 3, "png: expected RGB after decode");

    std::vector<png_byte> rowbuf(W * 3);
    out = TensorF({3, H, W});
    for (std::size_t y = 0; y < H; ++y) {
      png_read_row(png, rowbuf.data(), nullptr);
      for (std::size_t x = 0; x < W; ++x)
        for (std::size_t c = 0; c < 3; ++c)
          out.data()[(c * H + y) * W + x] =
              static_cast<float>(rowbuf[x * 3 + c] / 255.0 * 2.0 - 1.0);
    }
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);

  if (native_h != nullptr) *native_h = H;
  if (native_w != nullptr) *native_w = W;
  return out;
}

void save_png(const std::filesystem::path& path, const TensorF& img) {
  check(img.rank() == 3 && img.dim(0) == 3, "save_png: [3,H,W] expected");
  const std::size_t H = img.dim(1), W = img.dim(2);

  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  check(file != nullptr, "cannot open output file: " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            png_error_handler,
                                            png_warning_handler);
  check(png != nullptr, "png: allocation failure");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("png: allocation failure");
  }

  try {
    png_init_io(png, file.get());
    png_set_IHDR(png, info, W, H, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_byte> rowbuf(W * 3);
    for (std::size_t y = 0; y < H; ++y) {
      for (std::size_t x = 0; x < W; ++x)
        for (std::size_t c = 0; c < 3; ++c) {
          const double v =
              std::clamp(static_cast<double>(img.data()[(c * H + y) * W + x]),
                         -1.0, 1.0);
          rowbuf[x * 3 + c] =
              static_cast<png_byte>(std::lround((v + 1.0) / 2.0 * 255.0));
        }
      png_write_row(png, rowbuf.data());
    }
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
}

void save_png_gray(const std::filesystem::path& path, const TensorF& map) {
  check(map.rank() == 2, "save_png_gray: [H,W] expected");
  const std::size_t H = map.dim(0), W = map.dim(1);

  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  check(file != nullptr, "cannot open output file: " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            png_error_handler,
                                            png_warning_handler);
  check(png != nullptr, "png: allocation failure");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("png: allocation failure");
  }

  try {
    png_init_io(png, file.get());
    png_set_IHDR(png, info, W, H, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_byte> rowbuf(W);
    for (std::size_t y = 0; y < H; ++y) {
      for (std::size_t x = 0; x < W; ++x) {
        const double v =
            std::clamp(static_cast<double>(map.data()[y * W + x]), 0.0, 1.0);
        rowbuf[x] = static_cast<png_byte>(std::lround(v * 255.0));
      }
      png_write_row(png, rowbuf.data());
    }
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
}

TensorF resize_bilinear(const TensorF& img, std::size_t out_h,
                        std::size_t out_w) {
  check(img.rank() == 3, "resize: [C,H,W] expected");
  check(out_h > 0 && out_w > 0, "resize: non-positive output size");
  const std::size_t C = img.dim(0), H = img.dim(1), W = img.dim(2);
  if (H == out_h && W == out_w) return img;

  // Horizontal pass, then vertical; the triangle filter is separable.
  const auto fx = build_filter(W, out_w);
  TensorF mid({C, H, out_w});
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t y = 0; y < H; ++y) {
      const float* src = img.data() + (c * H + y) * W;
      float* dst = mid.data() + (c * H + y) * out_w;
      for (std::size_t x = 0; x < out_w; ++x) {
        const auto& row = fx[x];
        double acc = 0.0;
        for (std::size_t j = 0; j < row.weights.size(); ++j)
          acc += row.weights[j] * src[row.first + j];
        dst[x] = static_cast<float>(acc);
      }
    }

  const auto fy = build_filter(H, out_h);
  TensorF out({C, out_h, out_w});
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t y = 0; y < out_h; ++y) {
      const auto& row = fy[y];
      float* dst = out.data() + (c * out_h + y) * out_w;
      for (std::size_t x = 0; x < out_w; ++x) {
        double acc = 0.0;
        for (std::size_t j = 0; j < row.weights.size(); ++j)
          acc += row.weights[j] *
                 mid.data()[(c * H + row.first + j) * out_w + x];
        dst[x] = static_cast<float>(acc);
      }
    }
  return out;
}

TensorF decode_image(const std::filesystem::path& path, std::size_t level) {
  check(is_valid_level(level),
        "decode_image: invalid level " + std::to_string(level));
  TensorF native = load_png(path);
  return resize_bilinear(native, level, level);
}

}  // namespace posegen
