#pragma once

#include <stdexcept>
#include <string>

namespace posegen {

/// Error raised for invalid inputs, malformed files and contract violations.
/// The CLI maps any uncaught Error to a diagnostic on stderr and a nonzero
/// exit status.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void check(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace posegen
