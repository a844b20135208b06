#pragma once

// Synthetic stick-figure corpus shared by the unit and end-to-end tests:
// deterministic poses, per-subject colors, rendered PNGs with matching
// keypoint files, and JSONL manifests over them.

#include <unistd.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "posegen/descriptors.hpp"
#include "posegen/image.hpp"
#include "posegen/keypoints.hpp"
#include "posegen/rng.hpp"
#include "posegen/tensor.hpp"

namespace fixture {

namespace fs = std::filesystem;

inline fs::path temp_dir(const std::string& tag) {
  static std::uint64_t counter = 0;
  const fs::path dir = fs::temp_directory_path() /
                       ("posegen_" + tag + "_" + std::to_string(::getpid()) +
                        "_" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// A standing pose with all 18 joints present, jittered deterministically.
inline posegen::KeypointSet make_pose(std::size_t h, std::size_t w,
                                      posegen::Rng& rng,
                                      double jitter_frac = 0.05) {
  // Fractional (x, y) anchors in the joint order used everywhere else.
  static constexpr std::array<std::array<double, 2>, 18> anchors = {{
      {0.50, 0.14},  // nose
      {0.50, 0.26},  // neck
      {0.38, 0.28},  // right shoulder
      {0.33, 0.43},  // right elbow
      {0.30, 0.58},  // right wrist
      {0.62, 0.28},  // left shoulder
      {0.67, 0.43},  // left elbow
      {0.70, 0.58},  // left wrist
      {0.43, 0.55},  // right hip
      {0.42, 0.74},  // right knee
      {0.41, 0.92},  // right ankle
      {0.57, 0.55},  // left hip
      {0.58, 0.74},  // left knee
      {0.59, 0.92},  // left ankle
      {0.47, 0.12},  // right eye
      {0.53, 0.12},  // left eye
      {0.44, 0.15},  // right ear
      {0.56, 0.15},  // left ear
  }};

  posegen::KeypointSet kp;
  kp.height = h;
  kp.width = w;
  const double jx = jitter_frac * static_cast<double>(w);
  const double jy = jitter_frac * static_cast<double>(h);
  for (std::size_t k = 0; k < posegen::kKeypointCount; ++k) {
    double x = anchors[k][0] * static_cast<double>(w) +
               (rng.uniform() * 2.0 - 1.0) * jx;
    double y = anchors[k][1] * static_cast<double>(h) +
               (rng.uniform() * 2.0 - 1.0) * jy;
    x = std::min(std::max(x, 1.0), static_cast<double>(w) - 2.0);
    y = std::min(std::max(y, 1.0), static_cast<double>(h) - 2.0);
    kp.points[k] = {x, y, 1.0};
  }
  return kp;
}

inline void draw_segment(posegen::TensorF& img, double x0, double y0,
                         double x1, double y1, double thick,
                         const std::array<float, 3>& color) {
  const std::size_t h = img.dim(1), w = img.dim(2);
  const long lo_x = std::max(0L, std::lround(std::min(x0, x1) - thick - 1));
  const long hi_x = std::min(static_cast<long>(w) - 1,
                             std::lround(std::max(x0, x1) + thick + 1));
  const long lo_y = std::max(0L, std::lround(std::min(y0, y1) - thick - 1));
  const long hi_y = std::min(static_cast<long>(h) - 1,
                             std::lround(std::max(y0, y1) + thick + 1));
  const double dx = x1 - x0, dy = y1 - y0;
  const double len2 = dx * dx + dy * dy;
  for (long y = lo_y; y <= hi_y; ++y) {
    for (long x = lo_x; x <= hi_x; ++x) {
      const double px = static_cast<double>(x) - x0;
      const double py = static_cast<double>(y) - y0;
      double t = len2 > 0.0 ? (px * dx + py * dy) / len2 : 0.0;
      t = std::min(std::max(t, 0.0), 1.0);
      const double ex = px - t * dx, ey = py - t * dy;
      if (ex * ex + ey * ey <= thick * thick) {
        for (std::size_t c = 0; c < 3; ++c) {
          img.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) =
              color[c];
        }
      }
    }
  }
}

/// Renders a figure: limb segments plus a head disc on a dark background.
/// Limb shades vary around the base color so the texture is not flat.
inline posegen::TensorF render_figure(const posegen::KeypointSet& kp,
                                      const std::array<float, 3>& color) {
  const std::size_t h = kp.height, w = kp.width;
  posegen::TensorF img({3, h, w});
  img.fill(-0.85f);

  const posegen::SegmentTable table = posegen::SegmentTable::defaults();
  const double thick =
      std::max(1.5, static_cast<double>(std::min(h, w)) / 24.0);
  for (std::size_t s = 0; s < posegen::kSegmentCount; ++s) {
    const auto [a, b] = table.segments[s];
    const float shade = 0.55f + 0.45f * static_cast<float>(s) /
                                    static_cast<float>(posegen::kSegmentCount);
    const std::array<float, 3> limb = {color[0] * shade, color[1] * shade,
                                       color[2] * shade};
    draw_segment(img, kp.points[a].x, kp.points[a].y, kp.points[b].x,
                 kp.points[b].y, thick, limb);
  }
  // Neck-to-nose plus a head disc.
  draw_segment(img, kp.points[1].x, kp.points[1].y, kp.points[0].x,
               kp.points[0].y, thick, color);
  draw_segment(img, kp.points[0].x, kp.points[0].y, kp.points[0].x,
               kp.points[0].y, thick * 2.0, color);
  return img;
}

inline void write_keypoints_json(const fs::path& path,
                                 const posegen::KeypointSet& kp) {
  nlohmann::json arr = nlohmann::json::array();
  for (const posegen::Keypoint& p : kp.points) {
    arr.push_back({p.x, p.y, p.confidence});
  }
  std::ofstream f(path);
  f << arr.dump() << "\n";
}

struct Dataset {
  fs::path dir;
  fs::path manifest;
  std::vector<posegen::KeypointSet> poses;  // manifest order
};

/// subjects x frames_per_subject corpus at side x side. Subject palette is
/// fixed; poses are seeded jitters of the canonical standing pose.
inline Dataset make_dataset(const fs::path& dir, std::size_t subjects,
                            std::size_t frames_per_subject, std::size_t side,
                            std::uint64_t seed) {
  static constexpr std::array<std::array<float, 3>, 8> palette = {{
      {0.9f, 0.2f, 0.2f},
      {0.2f, 0.9f, 0.2f},
      {0.3f, 0.4f, 0.95f},
      {0.9f, 0.9f, 0.2f},
      {0.9f, 0.3f, 0.9f},
      {0.2f, 0.9f, 0.9f},
      {0.95f, 0.6f, 0.25f},
      {0.8f, 0.8f, 0.8f},
  }};

  fs::create_directories(dir);
  Dataset ds;
  ds.dir = dir;
  ds.manifest = dir / "manifest.jsonl";
  std::ofstream mf(ds.manifest);

  for (std::size_t s = 0; s < subjects; ++s) {
    const auto& color = palette[s % palette.size()];
    for (std::size_t f = 0; f < frames_per_subject; ++f) {
      posegen::Rng rng(posegen::Rng::mix(seed, s * 1000 + f));
      const posegen::KeypointSet kp = make_pose(side, side, rng);
      const posegen::TensorF img = render_figure(kp, color);

      const std::string stem =
          "s" + std::to_string(s) + "_f" + std::to_string(f);
      posegen::save_png(dir / (stem + ".png"), img);
      write_keypoints_json(dir / (stem + ".json"), kp);
      mf << nlohmann::json{{"subject_id", "subject" + std::to_string(s)},
                           {"frame_id", "frame" + std::to_string(f)},
                           {"image", stem + ".png"},
                           {"keypoints", stem + ".json"}}
                .dump()
         << "\n";
      ds.poses.push_back(kp);
    }
  }
  return ds;
}

}  // namespace fixture
