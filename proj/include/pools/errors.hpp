#pragma once

#include <stdexcept>
#include <string>

namespace pools {

// An exact computation would exceed its configured size bound.
// The CLI maps this to exit code 3.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solve failed to reach its tolerance.
// The CLI maps this to exit code 4.
class NonConvergenceError : public std::runtime_error {
 public:
  explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pools
