#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "posegen/tensor.hpp"

namespace posegen {

/// In-memory form of the versioned tensor container used for model
/// checkpoints and extractor weight files: a JSON metadata block plus named
/// float32 tensors (see docs/file-formats.md for the byte layout).
struct Checkpoint {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<std::pair<std::string, TensorF>> tensors;

  void add(std::string name, TensorF t) {
    tensors.emplace_back(std::move(name), std::move(t));
  }

  /// Returns the tensor with the given name, or nullptr.
  const TensorF* find(const std::string& name) const;

  bool has(const std::string& name) const { return find(name) != nullptr; }
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);

/// Loads and validates a container; throws on bad magic, unsupported
/// version, or truncation.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace posegen
