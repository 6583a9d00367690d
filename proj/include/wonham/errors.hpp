#ifndef WONHAM_ERRORS_HPP
#define WONHAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wonham {

// Invalid model/config input (bad rate matrix, off-simplex vector, ...).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical procedure failed (step collapse, singular solve, oracle
// non-convergence). Carries a human-readable diagnostic.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wonham

#endif
