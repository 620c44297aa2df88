#pragma once

#include <stdexcept>
#include <string>

namespace dbsplace {

/// Raised for unreadable, unparsable, or invalid configuration input.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error("config: " + msg) {}
};

/// Raised when a numerical routine cannot produce a usable result
/// (non-convergence, infeasible inputs, instance too large).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& msg) : std::runtime_error("solver: " + msg) {}
};

/// Raised for filesystem failures when emitting results.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error("io: " + msg) {}
};

}  // namespace dbsplace
