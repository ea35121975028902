#pragma once

#include <stdexcept>
#include <string>

namespace otb {

/// Invalid user-supplied input (config files, matrices, parameters).
/// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A mathematical identity or internal consistency check failed at runtime
/// (e.g. two independent computations of the same quantity disagree).
/// The CLI maps this to exit code 2.
class InvariantViolation : public std::runtime_error {
 public:
  explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / IO failure. The CLI maps this to exit code 3.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace otb
