#include "posegen/keypoints.hpp"

#include <fstream>

#include "json.hpp"
#include "posegen/error.hpp"

namespace posegen {

const std::array<std::string_view, kKeypointCount> kKeypointNames = {
    "nose",           "neck",          "right_shoulder", "right_elbow",
    "right_wrist",    "left_shoulder", "left_elbow",     "left_wrist",
    "right_hip",      "right_knee",    "right_ankle",    "left_hip",
    "left_knee",      "left_ankle",    "right_eye",      "left_eye",
    "right_ear",      "left_ear"};

KeypointSet load_keypoints(const std::filesystem::path& path,
                           std::size_t height, std::size_t width) {
  check(height > 0 && width > 0, "load_keypoints: non-positive grid");
  std::ifstream in(path);
  check(in.good(), "cannot open keypoint file: " + path.string());

  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed keypoint file " + path.string() + ": " + e.what());
  }
  check(doc.is_array(), "keypoint file " + path.string() +
                            ": expected a JSON array of 18 triples");
  check(doc.size() == kKeypointCount,
        "keypoint file " + path.string() + ": expected 18 entries, got " +
            std::to_string(doc.size()));

  KeypointSet kp;
  kp.height = height;
  kp.width = width;
  for (std::size_t i = 0; i < kKeypointCount; ++i) {
    const auto& e = doc[i];
    check(e.is_array() && e.size() == 3,
          "keypoint file " + path.string() + ": entry " + std::to_string(i) +
              " is not an [x, y, confidence] triple");
    for (const auto& v : e)
      check(v.is_number(), "keypoint file " + path.string() + ": entry " +
                               std::to_string(i) + " has a non-numeric field");
    Keypoint& p = kp.points[i];
    p.x = e[0].get<double>();
    p.y = e[1].get<double>();
    p.confidence = e[2].get<double>();
    if (p.present()) {
      check(p.x >= 0.0 && p.x < static_cast<double>(width) && p.y >= 0.0 &&
                p.y < static_cast<double>(height),
            "keypoint file " + path.string() + ": joint " +
                std::string(kKeypointNames[i]) + " lies outside the " +
                std::to_string(width) + "x" + std::to_string(height) +
                " image");
    }
  }
  return kp;
}

KeypointSet scale_keypoints(const KeypointSet& kp, std::size_t target_h,
                            std::size_t target_w) {
  check(target_h > 0 && target_w > 0, "scale_keypoints: non-positive target");
  check(kp.height > 0 && kp.width > 0, "scale_keypoints: source grid unset");
  const double fx = static_cast<double>(target_w) / kp.width;
  const double fy = static_cast<double>(target_h) / kp.height;
  KeypointSet out = kp;
  out.height = target_h;
  out.width = target_w;
  for (auto& p : out.points) {
    if (!p.present()) continue;
    p.x *= fx;
    p.y *= fy;
  }
  return out;
}

}  // namespace posegen
