#include "posegen/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "posegen/error.hpp"

namespace posegen {

namespace {

constexpr char kMagic[4] = {'P', 'G', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void require_little_endian() {
  check(std::endian::native == std::endian::little,
        "checkpoint container requires a little-endian host");
}

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  check(in.gcount() == static_cast<std::streamsize>(sizeof(T)),
        "truncated checkpoint while reading " + what);
  return v;
}

}  // namespace

const TensorF* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return &t;
  return nullptr;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  require_little_endian();

  nlohmann::json header;
  header["meta"] = ck.meta;
  auto& list = header["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;  // element offset into the float payload
  for (const auto& [name, t] : ck.tensors) {
    list.push_back({{"name", name}, {"shape", t.shape()}, {"offset", offset}});
    offset += t.size();
  }
  const std::string header_bytes = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  check(out.good(), "cannot open checkpoint for writing: " + path.string());
  out.write(kMagic, 4);
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint64_t>(out, header_bytes.size());
  out.write(header_bytes.data(),
            static_cast<std::streamsize>(header_bytes.size()));
  for (const auto& [name, t] : ck.tensors)
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(float)));
  out.flush();
  check(out.good(), "write failure on checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  require_little_endian();

  std::ifstream in(path, std::ios::binary);
  check(in.good(), "cannot open checkpoint: " + path.string());

  char magic[4];
  in.read(magic, 4);
  check(in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0,
        "not a checkpoint container (bad magic): " + path.string());
  const auto version = read_pod<std::uint32_t>(in, "version");
  check(version == kVersion, "unsupported checkpoint version " +
                                 std::to_string(version) + " in " +
                                 path.string());
  const auto header_len = read_pod<std::uint64_t>(in, "header length");
  std::string header_bytes(header_len, '\0');
  in.read(header_bytes.data(), static_cast<std::streamsize>(header_len));
  check(in.gcount() == static_cast<std::streamsize>(header_len),
        "truncated checkpoint header in " + path.string());

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_bytes);
  } catch (const nlohmann::json::exception& e) {
    throw Error("corrupt checkpoint header in " + path.string() + ": " +
                e.what());
  }
  check(header.contains("tensors") && header["tensors"].is_array(),
        "checkpoint header missing tensor list: " + path.string());

  Checkpoint ck;
  ck.meta = header.value("meta", nlohmann::json::object());
  std::uint64_t expect_offset = 0;
  for (const auto& entry : header["tensors"]) {
    check(entry.contains("name") && entry.contains("shape") &&
              entry.contains("offset"),
          "checkpoint tensor entry malformed in " + path.string());
    const auto name = entry["name"].get<std::string>();
    const auto shape = entry["shape"].get<std::vector<std::size_t>>();
    const auto offset = entry["offset"].get<std::uint64_t>();
    check(offset == expect_offset,
          "checkpoint tensor offsets not contiguous in " + path.string());
    TensorF t(shape);
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(float)));
    check(in.gcount() == static_cast<std::streamsize>(t.size() * sizeof(float)),
          "truncated checkpoint payload at tensor '" + name + "' in " +
              path.string());
    expect_offset += t.size();
    ck.add(name, std::move(t));
  }
  // Any trailing bytes mean the header and payload disagree.
  in.peek();
  check(in.eof(), "checkpoint has trailing bytes: " + path.string());
  return ck;
}

}  // namespace posegen
