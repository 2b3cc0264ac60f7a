#pragma once

#include <stdexcept>
#include <string>

namespace sp3d {

// Error classes shared across the library. The CLI maps any of them to a
// one-line diagnostic on stderr and a nonzero exit code.

struct SizeError : std::invalid_argument {
  explicit SizeError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct IndexError : std::out_of_range {
  explicit IndexError(const std::string& msg) : std::out_of_range(msg) {}
};

struct BudgetError : std::invalid_argument {
  explicit BudgetError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct IncompleteLogError : std::runtime_error {
  explicit IncompleteLogError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sp3d
