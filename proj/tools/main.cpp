#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "posegen/config.hpp"
#include "posegen/descriptors.hpp"
#include "posegen/error.hpp"
#include "posegen/heatmap.hpp"
#include "posegen/image.hpp"
#include "posegen/keypoints.hpp"
#include "posegen/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int cmd_train(const std::string& config_path, const std::string& resume) {
  const posegen::Config cfg = posegen::Config::load(config_path);
  std::optional<fs::path> resume_path;
  if (!resume.empty()) resume_path = resume;
  const posegen::TrainResult res = posegen::train(cfg, resume_path);
  std::cout << json{{"final_checkpoint", res.final_checkpoint.string()},
                    {"log", res.log_path.string()}}
                   .dump()
            << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& manifest,
             std::size_t level, const std::string& out) {
  const posegen::metrics::MetricsReport report =
      posegen::evaluate(checkpoint, manifest, level);
  const std::string text = report.to_json().dump();
  if (!out.empty()) {
    std::ofstream f(out);
    posegen::check(f.good(), "cannot open report output: " + out);
    f << text << "\n";
  }
  std::cout << text << "\n";
  return 0;
}

int cmd_infer(const std::string& checkpoint, const std::string& image,
              const std::string& keypoints, const std::string& out,
              std::size_t pose_h, std::size_t pose_w) {
  const posegen::TensorF result =
      posegen::infer(checkpoint, image, keypoints, pose_h, pose_w);
  posegen::save_png(out, result);
  std::cout << json{{"out", out}}.dump() << "\n";
  return 0;
}

int cmd_infer_sequence(const std::string& checkpoint, const std::string& image,
                       const std::string& keypoints_dir,
                       const std::string& out_dir, std::size_t pose_h,
                       std::size_t pose_w) {
  std::vector<fs::path> files;
  posegen::check(fs::is_directory(keypoints_dir),
                 "keypoints dir not found: " + keypoints_dir);
  for (const auto& entry : fs::directory_iterator(keypoints_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  const std::vector<posegen::TensorF> frames =
      posegen::infer_sequence(checkpoint, image, files, pose_h, pose_w);

  fs::create_directories(out_dir);
  json names = json::array();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const fs::path out =
        fs::path(out_dir) / (files[i].stem().string() + ".png");
    posegen::save_png(out, frames[i]);
    names.push_back(out.string());
  }
  std::cout << json{{"frames", names}}.dump() << "\n";
  return 0;
}

int cmd_make_heatmaps(const std::string& keypoints, std::size_t height,
                      std::size_t width, std::size_t grid, double sigma,
                      const std::string& out_dir) {
  posegen::KeypointSet kp = posegen::load_keypoints(keypoints, height, width);
  kp = posegen::scale_keypoints(kp, grid, grid);
  const posegen::TensorF maps =
      posegen::render_heatmaps(kp, grid, grid, sigma);

  fs::create_directories(out_dir);
  json names = json::array();
  for (std::size_t k = 0; k < posegen::kKeypointCount; ++k) {
    posegen::TensorF channel({grid, grid});
    std::copy(maps.storage().begin() + k * grid * grid,
              maps.storage().begin() + (k + 1) * grid * grid,
              channel.storage().begin());
    char idx[8];
    std::snprintf(idx, sizeof(idx), "%02zu", k);
    const fs::path out =
        fs::path(out_dir) / ("heatmap_" + std::string(idx) + "_" +
                             std::string(posegen::kKeypointNames[k]) + ".png");
    posegen::save_png_gray(out, channel);
    names.push_back(out.string());
  }
  std::cout << json{{"maps", names}}.dump() << "\n";
  return 0;
}

int cmd_descriptors_preview(const std::string& keypoints, std::size_t height,
                            std::size_t width, std::size_t level,
                            std::size_t count) {
  posegen::KeypointSet kp = posegen::load_keypoints(keypoints, height, width);
  kp = posegen::scale_keypoints(kp, level, level);
  const posegen::DescriptorSet ds =
      posegen::build_descriptors(kp, level, count);

  json list = json::array();
  for (const posegen::DescriptorPoint& c : ds.centers) {
    const posegen::Rect r = posegen::crop_window(c.x, c.y, level);
    list.push_back(json{{"x", c.x},
                        {"y", c.y},
                        {"window", {{"x0", r.x0}, {"y0", r.y0},
                                    {"side", r.side}}}});
  }
  std::cout << json{{"level", level},
                    {"window_side", ds.window_side},
                    {"count", ds.size()},
                    {"descriptors", list}}
                   .dump(2)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "posegen: pose-guided appearance transfer - training, evaluation and "
      "inference"};
  app.require_subcommand(1);

  std::string config_path, resume;
  CLI::App* train = app.add_subcommand("train", "Run progressive training");
  train->add_option("--config", config_path, "JSON config file")->required();
  train->add_option("--resume", resume, "checkpoint to resume from");

  std::string ck, manifest, report_out;
  std::size_t level = 0;
  CLI::App* eval =
      app.add_subcommand("eval", "Score a checkpoint over a manifest");
  eval->add_option("--checkpoint", ck, "model checkpoint")->required();
  eval->add_option("--manifest", manifest, "dataset manifest")->required();
  eval->add_option("--level", level, "resolution to evaluate at")->required();
  eval->add_option("--out", report_out, "also write the JSON report here");

  std::string image, keypoints, out, keypoints_dir, out_dir;
  std::size_t pose_h = 0, pose_w = 0;
  CLI::App* infer =
      app.add_subcommand("infer", "Generate one image at a target pose");
  infer->add_option("--checkpoint", ck, "model checkpoint")->required();
  infer->add_option("--image", image, "reference appearance PNG")->required();
  infer->add_option("--keypoints", keypoints, "target pose keypoint file")
      ->required();
  infer->add_option("--out", out, "output PNG path")->required();
  infer->add_option("--pose-height", pose_h,
                    "pixel grid height the keypoints are expressed in "
                    "(default: reference image's native height)");
  infer->add_option("--pose-width", pose_w,
                    "pixel grid width the keypoints are expressed in");

  CLI::App* seq = app.add_subcommand(
      "infer-sequence", "Generate a frame per keypoint file in a directory");
  seq->add_option("--checkpoint", ck, "model checkpoint")->required();
  seq->add_option("--image", image, "reference appearance PNG")->required();
  seq->add_option("--keypoints-dir", keypoints_dir,
                  "directory of .json keypoint files (sorted by name)")
      ->required();
  seq->add_option("--out-dir", out_dir, "output directory")->required();
  seq->add_option("--pose-height", pose_h, "keypoint grid height");
  seq->add_option("--pose-width", pose_w, "keypoint grid width");

  std::size_t height = 0, width = 0, grid = posegen::kPoseGrid;
  double sigma = posegen::kDefaultSigma;
  CLI::App* heat = app.add_subcommand(
      "make-heatmaps", "Render per-joint Gaussian maps as grayscale PNGs");
  heat->add_option("--keypoints", keypoints, "keypoint file")->required();
  heat->add_option("--height", height, "keypoint grid height")->required();
  heat->add_option("--width", width, "keypoint grid width")->required();
  heat->add_option("--grid", grid, "output map side (default 32)");
  heat->add_option("--sigma", sigma, "Gaussian spread in grid px");
  heat->add_option("--out-dir", out_dir, "output directory")->required();

  std::size_t count = 0;
  CLI::App* desc = app.add_subcommand(
      "descriptors-preview", "Print descriptor windows for a pose as JSON");
  desc->add_option("--keypoints", keypoints, "keypoint file")->required();
  desc->add_option("--height", height, "keypoint grid height")->required();
  desc->add_option("--width", width, "keypoint grid width")->required();
  desc->add_option("--level", level, "resolution level")->required();
  desc->add_option("--count", count, "descriptor count (18/31/44; default: "
                                     "the level's schedule)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(config_path, resume);
    if (eval->parsed()) return cmd_eval(ck, manifest, level, report_out);
    if (infer->parsed()) {
      return cmd_infer(ck, image, keypoints, out, pose_h, pose_w);
    }
    if (seq->parsed()) {
      return cmd_infer_sequence(ck, image, keypoints_dir, out_dir, pose_h,
                                pose_w);
    }
    if (heat->parsed()) {
      return cmd_make_heatmaps(keypoints, height, width, grid, sigma, out_dir);
    }
    if (desc->parsed()) {
      return cmd_descriptors_preview(keypoints, height, width, level, count);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
