#pragma once

#include <stdexcept>
#include <string>

namespace cahnlab {

/// Raised when an operation rejects its inputs or fails to produce a valid result.
class Rejection : public std::runtime_error {
 public:
  explicit Rejection(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cahnlab
