#include <cmath>

#include "doctest.h"
#include "fixture.hpp"
#include "posegen/error.hpp"
#include "posegen/heatmap.hpp"
#include "posegen/keypoints.hpp"
#include "posegen/rng.hpp"

using namespace posegen;

namespace {

KeypointSet empty_grid(std::size_t h, std::size_t w) {
  KeypointSet kp;
  kp.height = h;
  kp.width = w;
  return kp;
}

}  // namespace

TEST_CASE("gaussian peak is exactly 1 at the keypoint pixel") {
  KeypointSet kp = empty_grid(32, 32);
  kp.points[0] = {16.0, 12.0, 1.0};
  const TensorF maps = render_heatmaps(kp, 32, 32);
  CHECK(maps.at(0, 12, 16) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("value at distance sigma is exp(-1/2)") {
  KeypointSet kp = empty_grid(64, 64);
  const double sigma = 4.0;  // integer so the radius lands on a pixel
  kp.points[3] = {20.0, 30.0, 1.0};
  const TensorF maps = render_heatmaps(kp, 64, 64, sigma);
  const double expected = std::exp(-0.5);
  CHECK(maps.at(3, 30, 24) == doctest::Approx(expected).epsilon(1e-6));
  CHECK(maps.at(3, 34, 20) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("values decay monotonically along a ray from the center") {
  KeypointSet kp = empty_grid(32, 32);
  kp.points[5] = {10.0, 10.0, 1.0};
  const TensorF maps = render_heatmaps(kp, 32, 32);
  for (std::size_t x = 11; x < 31; ++x) {
    CHECK(maps.at(5, 10, x) < maps.at(5, 10, x - 1));
  }
}

TEST_CASE("missing keypoints render all-zero channels") {
  KeypointSet kp = empty_grid(32, 32);
  kp.points[2] = {5.0, 5.0, 1.0};  // only joint 2 present
  const TensorF maps = render_heatmaps(kp, 32, 32);
  for (std::size_t k = 0; k < kKeypointCount; ++k) {
    if (k == 2) continue;
    double acc = 0.0;
    for (std::size_t y = 0; y < 32; ++y) {
      for (std::size_t x = 0; x < 32; ++x) acc += maps.at(k, y, x);
    }
    CHECK(acc == 0.0);
  }
}

TEST_CASE("channel order tracks the joint order") {
  KeypointSet kp = empty_grid(32, 32);
  for (std::size_t k = 0; k < kKeypointCount; ++k) {
    kp.points[k] = {static_cast<double>(k) + 2.0, 7.0, 1.0};
  }
  const TensorF maps = render_heatmaps(kp, 32, 32);
  for (std::size_t k = 0; k < kKeypointCount; ++k) {
    CHECK(maps.at(k, 7, k + 2) == doctest::Approx(1.0));
  }
}

TEST_CASE("argmax round trip recovers integer keypoints exactly") {
  Rng rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    KeypointSet kp = empty_grid(32, 32);
    for (std::size_t k = 0; k < kKeypointCount; ++k) {
      if (rng.uniform() < 0.2) continue;  // leave some joints missing
      kp.points[k] = {static_cast<double>(rng.below(32)),
                      static_cast<double>(rng.below(32)), 1.0};
    }
    const TensorF maps = render_heatmaps(kp, 32, 32);
    const KeypointSet back = heatmap_argmax(maps);
    for (std::size_t k = 0; k < kKeypointCount; ++k) {
      CAPTURE(rep);
      CAPTURE(k);
      REQUIRE(back.points[k].present() == kp.points[k].present());
      if (kp.points[k].present()) {
        REQUIRE(back.points[k].x == kp.points[k].x);
        REQUIRE(back.points[k].y == kp.points[k].y);
      }
    }
  }
}

TEST_CASE("sub-pixel centers still yield a peak at the nearest pixel") {
  KeypointSet kp = empty_grid(32, 32);
  kp.points[0] = {15.4, 20.6, 1.0};
  const TensorF maps = render_heatmaps(kp, 32, 32);
  const KeypointSet back = heatmap_argmax(maps);
  CHECK(back.points[0].x == 15.0);
  CHECK(back.points[0].y == 21.0);
}

TEST_CASE("non-positive sigma and grid mismatches are rejected") {
  KeypointSet kp = empty_grid(32, 32);
  kp.points[0] = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS((void)render_heatmaps(kp, 32, 32, 0.0), Error);
  CHECK_THROWS_AS((void)render_heatmaps(kp, 32, 32, -1.0), Error);
  CHECK_THROWS_AS((void)render_heatmaps(kp, 64, 64), Error);  // grid != kp grid
}

TEST_CASE("wider sigma spreads mass without moving the peak") {
  KeypointSet kp = empty_grid(32, 32);
  kp.points[0] = {16.0, 16.0, 1.0};
  const TensorF narrow = render_heatmaps(kp, 32, 32, 1.0);
  const TensorF wide = render_heatmaps(kp, 32, 32, 6.0);
  CHECK(narrow.at(0, 16, 16) == doctest::Approx(1.0));
  CHECK(wide.at(0, 16, 16) == doctest::Approx(1.0));
  CHECK(wide.at(0, 16, 24) > narrow.at(0, 16, 24));
}
