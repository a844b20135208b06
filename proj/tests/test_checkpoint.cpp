#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "fixture.hpp"
#include "posegen/checkpoint.hpp"
#include "posegen/error.hpp"
#include "posegen/rng.hpp"

using namespace posegen;
namespace fs = std::filesystem;

namespace {

Checkpoint sample_checkpoint() {
  Checkpoint ck;
  ck.meta = {{"kind", "test"}, {"step", 123}, {"nested", {{"a", 1}}}};
  Rng rng(4);
  TensorF a({2, 3, 4});
  for (float& v : a.storage()) v = static_cast<float>(rng.normal());
  TensorF b({7});
  for (float& v : b.storage()) v = static_cast<float>(rng.uniform());
  TensorF c({1, 1, 2, 2});
  c.storage() = {-1.5f, 0.0f, 3.25f, 1e-20f};
  ck.add("module.weight", a);
  ck.add("module.bias", b);
  ck.add("other.exact", c);
  return ck;
}

}  // namespace

TEST_CASE("container round trip preserves meta, names, shapes and bits") {
  const fs::path dir = fixture::temp_dir("ck");
  const Checkpoint ck = sample_checkpoint();
  save_checkpoint(dir / "a.pgck", ck);
  const Checkpoint back = load_checkpoint(dir / "a.pgck");

  CHECK(back.meta == ck.meta);
  REQUIRE(back.tensors.size() == ck.tensors.size());
  for (std::size_t i = 0; i < ck.tensors.size(); ++i) {
    CHECK(back.tensors[i].first == ck.tensors[i].first);
    REQUIRE(back.tensors[i].second.shape() == ck.tensors[i].second.shape());
    const auto& x = ck.tensors[i].second.storage();
    const auto& y = back.tensors[i].second.storage();
    for (std::size_t j = 0; j < x.size(); ++j) REQUIRE(x[j] == y[j]);
  }
  fs::remove_all(dir);
}

TEST_CASE("find and has locate tensors by name") {
  const Checkpoint ck = sample_checkpoint();
  CHECK(ck.has("module.weight"));
  CHECK(!ck.has("module.missing"));
  REQUIRE(ck.find("other.exact") != nullptr);
  CHECK(ck.find("other.exact")->size() == 4);
}

TEST_CASE("bad magic is rejected") {
  const fs::path dir = fixture::temp_dir("ck");
  {
    std::ofstream f(dir / "bad.pgck", std::ios::binary);
    f << "NOPE" << std::string(64, '\0');
  }
  CHECK_THROWS_AS((void)load_checkpoint(dir / "bad.pgck"), Error);
  fs::remove_all(dir);
}

TEST_CASE("unsupported version is rejected") {
  const fs::path dir = fixture::temp_dir("ck");
  save_checkpoint(dir / "v.pgck", sample_checkpoint());
  // Bump the version field in place (bytes 4..7, little endian).
  std::fstream f(dir / "v.pgck",
                 std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(4);
  const std::uint32_t bogus = 999;
  f.write(reinterpret_cast<const char*>(&bogus), 4);
  f.close();
  CHECK_THROWS_AS((void)load_checkpoint(dir / "v.pgck"), Error);
  fs::remove_all(dir);
}

TEST_CASE("truncated payloads are rejected") {
  const fs::path dir = fixture::temp_dir("ck");
  save_checkpoint(dir / "t.pgck", sample_checkpoint());
  const auto full = fs::file_size(dir / "t.pgck");
  fs::resize_file(dir / "t.pgck", full - 5);
  CHECK_THROWS_AS((void)load_checkpoint(dir / "t.pgck"), Error);
  fs::remove_all(dir);
}

TEST_CASE("trailing garbage is rejected") {
  const fs::path dir = fixture::temp_dir("ck");
  save_checkpoint(dir / "g.pgck", sample_checkpoint());
  {
    std::ofstream f(dir / "g.pgck", std::ios::binary | std::ios::app);
    f << "extra";
  }
  CHECK_THROWS_AS((void)load_checkpoint(dir / "g.pgck"), Error);
  fs::remove_all(dir);
}

TEST_CASE("missing file gives a named error") {
  CHECK_THROWS_AS((void)load_checkpoint("/nonexistent/x.pgck"), Error);
}

TEST_CASE("empty tensor lists are representable") {
  const fs::path dir = fixture::temp_dir("ck");
  Checkpoint ck;
  ck.meta = {{"kind", "empty"}};
  save_checkpoint(dir / "e.pgck", ck);
  const Checkpoint back = load_checkpoint(dir / "e.pgck");
  CHECK(back.tensors.empty());
  CHECK(back.meta.at("kind") == "empty");
  fs::remove_all(dir);
}
