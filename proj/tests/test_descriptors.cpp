#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "fixture.hpp"
#include "posegen/descriptors.hpp"
#include "posegen/error.hpp"
#include "posegen/rng.hpp"

using namespace posegen;

namespace {

KeypointSet full_pose(std::size_t level, std::uint64_t seed) {
  Rng rng(seed);
  return fixture::make_pose(level, level, rng);
}

// Independent clamp oracle: scan all origins and pick the one with the
// smallest |origin - (rounded_center - side/2)|, i.e. brute-force the
// nearest in-bounds placement.
long brute_force_origin(double center, long side, long level) {
  const long want = std::lround(center) - side / 2;
  long best = 0;
  long best_dist = std::numeric_limits<long>::max();
  for (long o = 0; o + side <= level; ++o) {
    const long dist = std::labs(o - want);
    if (dist < best_dist) {
      best_dist = dist;
      best = o;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("descriptor counts follow the level schedule") {
  CHECK(descriptor_count_for_level(64) == 18);
  CHECK(descriptor_count_for_level(128) == 18);
  CHECK(descriptor_count_for_level(256) == 31);
  CHECK(descriptor_count_for_level(512) == 31);
  CHECK(descriptor_count_for_level(1024) == 44);
  CHECK_THROWS_AS((void)descriptor_count_for_level(100), Error);
}

TEST_CASE("built sets hit the nominal counts when all joints are present") {
  for (std::size_t level : {std::size_t{64}, std::size_t{128},
                            std::size_t{256}, std::size_t{512},
                            std::size_t{1024}}) {
    const KeypointSet kp = full_pose(level, level);
    const DescriptorSet ds = build_descriptors(kp, level);
    CAPTURE(level);
    CHECK(ds.size() == descriptor_count_for_level(level));
    CHECK(ds.window_side == level / 8);
    CHECK(ds.level == level);
  }
}

TEST_CASE("midpoint of a synthetic segment lands halfway") {
  KeypointSet kp;
  kp.height = kp.width = 256;
  for (std::size_t k = 0; k < kKeypointCount; ++k) {
    kp.points[k] = {100.0, 100.0, 1.0};
  }
  kp.points[2] = {40.0, 60.0, 1.0};  // right shoulder
  kp.points[3] = {80.0, 100.0, 1.0};  // right elbow -> segment 0
  const DescriptorSet ds = build_descriptors(kp, 256);
  REQUIRE(ds.size() == 31);
  // First interpolated center comes right after the 18 raw joints.
  CHECK(ds.centers[18].x == doctest::Approx(60.0));
  CHECK(ds.centers[18].y == doctest::Approx(80.0));
}

TEST_CASE("denser sets extend the sparser ones (coverage grows)") {
  const KeypointSet kp64 = full_pose(64, 5);
  const KeypointSet kp256 = scale_keypoints(kp64, 256, 256);
  const KeypointSet kp1024 = scale_keypoints(kp64, 1024, 1024);

  const DescriptorSet d18 = build_descriptors(kp256, 256, 18);
  const DescriptorSet d31 = build_descriptors(kp256, 256, 31);
  const DescriptorSet d44 = build_descriptors(kp1024, 1024, 44);

  REQUIRE(d18.size() == 18);
  REQUIRE(d31.size() == 31);
  REQUIRE(d44.size() == 44);
  // The 31-set begins with the 18-set
  for (std::size_t i = 0; i < 18; ++i) {
    CHECK(d31.centers[i].x == doctest::Approx(d18.centers[i].x));
    CHECK(d31.centers[i].y == doctest::Approx(d18.centers[i].y));
  }
  // ... and the 44-set (at 4x scale) begins with the 31-set scaled by 4.
  for (std::size_t i = 0; i < 31; ++i) {
    CHECK(d44.centers[i].x == doctest::Approx(d31.centers[i].x * 4.0));
    CHECK(d44.centers[i].y == doctest::Approx(d31.centers[i].y * 4.0));
  }
}

TEST_CASE("missing anchor joints drop only the affected descriptors") {
  KeypointSet kp = full_pose(256, 6);
  kp.points[4].confidence = 0.0;  // right wrist: kills raw joint 4 and
                                  // segment (3,4)'s midpoint
  const DescriptorSet ds = build_descriptors(kp, 256);
  CHECK(ds.size() == 31 - 2);
}

TEST_CASE("crop windows match a brute-force clamp oracle on 1000 draws") {
  Rng rng(12345);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t level = std::array<std::size_t, 3>{64, 256, 1024}[
        rng.below(3)];
    // Centers deliberately overshoot the image so clamping is exercised.
    const double cx =
        rng.uniform() * (static_cast<double>(level) + 40.0) - 20.0;
    const double cy =
        rng.uniform() * (static_cast<double>(level) + 40.0) - 20.0;
    const Rect r = crop_window(cx, cy, level);
    const long side = static_cast<long>(level / 8);
    CAPTURE(rep);
    CAPTURE(cx);
    CAPTURE(cy);
    REQUIRE(r.side == level / 8);
    REQUIRE(static_cast<long>(r.x0) ==
            brute_force_origin(cx, side, static_cast<long>(level)));
    REQUIRE(static_cast<long>(r.y0) ==
            brute_force_origin(cy, side, static_cast<long>(level)));
    REQUIRE(r.x0 + r.side <= level);
    REQUIRE(r.y0 + r.side <= level);
  }
}

TEST_CASE("building is idempotent and deterministic") {
  const KeypointSet kp = full_pose(512, 7);
  const DescriptorSet a = build_descriptors(kp, 512);
  const DescriptorSet b = build_descriptors(kp, 512);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.centers[i].x == b.centers[i].x);
    CHECK(a.centers[i].y == b.centers[i].y);
  }
}

TEST_CASE("extract_crops copies the exact window contents") {
  const std::size_t level = 64;
  TensorF img({3, level, level});
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < level; ++y) {
      for (std::size_t x = 0; x < level; ++x) {
        img.at(c, y, x) = static_cast<float>((c * level + y) * level + x);
      }
    }
  }
  const KeypointSet kp = full_pose(level, 9);
  const DescriptorSet ds = build_descriptors(kp, level);
  const std::vector<TensorF> crops = extract_crops(img, ds);
  REQUIRE(crops.size() == ds.size());
  for (std::size_t d = 0; d < ds.size(); ++d) {
    const Rect r = crop_window(ds.centers[d].x, ds.centers[d].y, level);
    REQUIRE(crops[d].shape() == std::vector<std::size_t>{3, 8, 8});
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t y = 0; y < 8; ++y) {
        for (std::size_t x = 0; x < 8; ++x) {
          REQUIRE(crops[d].at(c, y, x) == img.at(c, r.y0 + y, r.x0 + x));
        }
      }
    }
  }
}

TEST_CASE("keypoints at the wrong grid are rejected") {
  const KeypointSet kp = full_pose(64, 3);
  CHECK_THROWS_AS((void)build_descriptors(kp, 128), Error);
}

TEST_CASE("unsupported descriptor counts are rejected") {
  const KeypointSet kp = full_pose(64, 4);
  CHECK_THROWS_AS((void)build_descriptors(kp, 64, 25), Error);
}
