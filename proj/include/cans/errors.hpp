#pragma once

#include <stdexcept>
#include <string>

namespace cans {

// Numerical failure: solver did not converge, system too ill-conditioned,
// overflow, oracle size cap exceeded, ... CLI maps this to exit code 1.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (matrix text, schedule/composition JSON).
// CLI maps this to exit code 2.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cans
