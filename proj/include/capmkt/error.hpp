#pragma once

#include <stdexcept>
#include <string>

namespace capmkt {

// Raised for invalid inputs: out-of-range parameters, dangling references,
// malformed files. Messages name the offending field (and file/row/column
// when the value came from disk).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when a computation cannot produce a meaningful answer, e.g. an
// hourly LP that fails to solve or an analytic quantity asked of an
// uncleared market.
class ComputationError : public std::runtime_error {
 public:
  explicit ComputationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace capmkt
