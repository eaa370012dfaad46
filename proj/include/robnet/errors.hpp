#pragma once

#include <stdexcept>
#include <string>

namespace robnet {

// Invalid argument values: wrong sizes, out-of-range parameters, malformed
// weight vectors, and so on. Everything the caller could have checked.
class parameter_error : public std::invalid_argument {
public:
  explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

// An iterative routine ran out of iterations before meeting its tolerance.
// Carries the last iterate's value so callers can decide whether it is usable.
class convergence_error : public std::runtime_error {
public:
  convergence_error(const std::string& what, double last_value)
      : std::runtime_error(what), last_value_(last_value) {}
  double last_value() const noexcept { return last_value_; }

private:
  double last_value_;
};

// A quantity that must be non-degenerate for the requested computation is
// degenerate: zero-variance losses, risks at 0 or 1, empty supports.
class degenerate_input_error : public std::runtime_error {
public:
  explicit degenerate_input_error(const std::string& what) : std::runtime_error(what) {}
};

// File and parse failures for the edge-list / CSV / JSON interfaces.
class io_error : public std::runtime_error {
public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace robnet
