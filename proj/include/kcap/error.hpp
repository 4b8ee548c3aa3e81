#pragma once

#include <stdexcept>
#include <string>

namespace kcap {

/// Raised when a caller violates an operation's preconditions
/// (bad dimensions, out-of-range ids, invalid parameters).
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// The level-set solver found a plateau it cannot split into measure alpha.
class DegenerateLevelError : public std::runtime_error {
 public:
  explicit DegenerateLevelError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw UsageError(message);
}

}  // namespace kcap
