#pragma once

#include <stdexcept>
#include <string>

namespace gembed {

// Bad inputs: malformed files, out-of-range parameters, violated
// preconditions.  The command line maps these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what)
      : std::runtime_error(what) {}
};

// Iterative procedures that ran out of budget (model fits, rewiring).
// Exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace gembed
