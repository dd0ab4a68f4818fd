#pragma once

#include <stdexcept>
#include <string>

namespace sohb {

/// Requested matrix/vector dimensions do not match.
class DimensionMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The rotation maximizing A.J is not unique (det(UV^T) = -1 with the two
/// smallest singular values tied).
class NonUniqueProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Strict-mode projection rejected a (near-)singular input.
class SingularProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An adaptive integration loop exhausted its resolution budget.
class NoConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two algebraically equivalent in-route forms disagreed beyond tolerance.
class InternalMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Importance-sampling effective sample size fell below the usable floor.
class DegenerateEssError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration (CLI/TOML) input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sohb
