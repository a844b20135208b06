#include <fstream>
#include <set>

#include "doctest.h"
#include "fixture.hpp"
#include "posegen/dataset.hpp"
#include "posegen/error.hpp"

using namespace posegen;
namespace fs = std::filesystem;

namespace {

fixture::Dataset small_corpus(const char* tag) {
  return fixture::make_dataset(fixture::temp_dir(tag), 3, 2, 64, 42);
}

}  // namespace

TEST_CASE("manifest loads with the right record count and resolved paths") {
  const fixture::Dataset ds = small_corpus("ds_load");
  const DatasetManifest m = load_manifest(ds.manifest);
  CHECK(m.size() == 6);
  for (const ManifestRecord& r : m.records) {
    CHECK(fs::exists(r.image_path));
    CHECK(fs::exists(r.keypoint_path));
  }
  fs::remove_all(ds.dir);
}

TEST_CASE("missing files are reported with the offending path") {
  const fixture::Dataset ds = small_corpus("ds_missing");
  fs::remove(ds.dir / "s1_f1.png");
  try {
    (void)load_manifest(ds.manifest);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("s1_f1.png") != std::string::npos);
  }
  fs::remove_all(ds.dir);
}

TEST_CASE("structural manifest errors name the line number") {
  const fixture::Dataset ds = small_corpus("ds_badline");
  {
    std::ofstream f(ds.manifest, std::ios::app);
    f << "not json at all\n";
  }
  try {
    (void)load_manifest(ds.manifest);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
  }
  fs::remove_all(ds.dir);
}

TEST_CASE("a subject with a single frame is rejected by name") {
  const fixture::Dataset ds = small_corpus("ds_single");
  {
    // Append a one-frame subject (files exist, so only pairing fails).
    std::ofstream f(ds.manifest, std::ios::app);
    f << nlohmann::json{{"subject_id", "loner"},
                        {"frame_id", "only"},
                        {"image", "s0_f0.png"},
                        {"keypoints", "s0_f0.json"}}
             .dump()
      << "\n";
  }
  try {
    (void)load_manifest(ds.manifest);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("loner") != std::string::npos);
  }
  fs::remove_all(ds.dir);
}

TEST_CASE("pair enumeration covers exactly the ordered same-subject pairs") {
  const fixture::Dataset ds =
      fixture::make_dataset(fixture::temp_dir("ds_pairs"), 2, 3, 64, 1);
  const DatasetManifest m = load_manifest(ds.manifest);
  const PairSampler sampler(m, 0);
  // 2 subjects x 3 frames -> 3*2 = 6 ordered pairs each.
  REQUIRE(sampler.all_pairs().size() == 12);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const PairIndices& p : sampler.all_pairs()) {
    CHECK(p.reference != p.target);
    CHECK(m.records[p.reference].subject_id == m.records[p.target].subject_id);
    seen.insert({p.reference, p.target});
  }
  CHECK(seen.size() == 12);  // no duplicates
  fs::remove_all(ds.dir);
}

TEST_CASE("sampling is a pure function of (seed, index)") {
  const fixture::Dataset ds = small_corpus("ds_pure");
  const DatasetManifest m = load_manifest(ds.manifest);
  const PairSampler a(m, 777);
  const PairSampler b(m, 777);
  const PairSampler c(m, 778);

  bool any_diff = false;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const PairIndices pa = a.sample(i);
    const PairIndices pb = b.sample(i);
    CHECK(pa.reference == pb.reference);
    CHECK(pa.target == pb.target);
    const PairIndices pc = c.sample(i);
    any_diff |= pc.reference != pa.reference || pc.target != pa.target;
  }
  CHECK(any_diff);  // different seed gives a different stream
  // Re-querying an old index after later draws gives the same answer.
  const PairIndices early = a.sample(3);
  (void)a.sample(90);
  const PairIndices again = a.sample(3);
  CHECK(early.reference == again.reference);
  CHECK(early.target == again.target);
  fs::remove_all(ds.dir);
}

TEST_CASE("1000 draws stay within subjects and cover all of them") {
  const fixture::Dataset ds = small_corpus("ds_draws");
  const DatasetManifest m = load_manifest(ds.manifest);
  const PairSampler sampler(m, 5);
  std::set<std::string> subjects;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const PairIndices p = sampler.sample(i);
    REQUIRE(m.records[p.reference].subject_id ==
            m.records[p.target].subject_id);
    REQUIRE(p.reference != p.target);
    subjects.insert(m.records[p.reference].subject_id);
  }
  CHECK(subjects.size() == 3);
  fs::remove_all(ds.dir);
}

TEST_CASE("epoch_range bounds the valid draw indices") {
  const fixture::Dataset ds = small_corpus("ds_epoch");
  const DatasetManifest m = load_manifest(ds.manifest);
  const PairSampler bounded(m, 1, 10);
  (void)bounded.sample(9);
  CHECK_THROWS_AS((void)bounded.sample(10), Error);
  const PairSampler unlimited(m, 1, 0);
  (void)unlimited.sample(1000000);
  fs::remove_all(ds.dir);
}

TEST_CASE("load_pair decodes both frames at the level with scaled keypoints") {
  const fixture::Dataset ds = small_corpus("ds_pair");
  const DatasetManifest m = load_manifest(ds.manifest);
  const PairSampler sampler(m, 2);
  const PairIndices pi = sampler.sample(0);
  const LoadedPair lp = load_pair(m, pi, 64);
  CHECK(lp.reference.shape() == std::vector<std::size_t>{3, 64, 64});
  CHECK(lp.target.shape() == std::vector<std::size_t>{3, 64, 64});
  CHECK(lp.target_keypoints.height == 64);
  CHECK(lp.target_keypoints.width == 64);
  CHECK(lp.subject_id == m.records[pi.reference].subject_id);
  for (const Keypoint& p : lp.target_keypoints.points) {
    if (!p.present()) continue;
    CHECK(p.x >= 0.0);
    CHECK(p.x < 64.0);
    CHECK(p.y >= 0.0);
    CHECK(p.y < 64.0);
  }
  fs::remove_all(ds.dir);
}
