#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace tomokit {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// A density (or tomogram slice) does not integrate to 1 within tolerance.
class normalization_error : public error {
 public:
  normalization_error(const std::string& what, double measured)
      : error(what + " (measured integral " + std::to_string(measured) + ")"),
        integral(measured) {}
  double integral;
};

/// A (mu, nu) reference frame degenerated to (0, 0), or a required frame is missing.
class frame_error : public error {
 public:
  using error::error;
};

/// Mass was pushed outside the representable window beyond tolerance.
class truncation_error : public error {
 public:
  truncation_error(const std::string& what, double lost)
      : error(what + " (mass lost " + std::to_string(lost) + ")"), mass_lost(lost) {}
  double mass_lost;
};

/// Sampled tomogram does not cover enough cutting angles for inversion.
class coverage_error : public error {
 public:
  using error::error;
};

/// A kernel or operator expected to be Hermitian is not, beyond tolerance.
class hermiticity_error : public error {
 public:
  using error::error;
};

/// Correlation coefficient left the open interval (-1, 1).
class correlation_error : public error {
 public:
  using error::error;
};

/// A state offered for a slot it is not admissible in.
class admissibility_error : public error {
 public:
  using error::error;
};

/// Grid geometry mismatch between operands.
class grid_mismatch_error : public error {
 public:
  using error::error;
};

namespace detail {

/// Trapezoidal node weight on a uniform axis with n samples and spacing h.
inline double trapezoid_weight(int i, int n, double h) {
  return (i == 0 || i == n - 1) ? 0.5 * h : h;
}

inline bool approx(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace detail

}  // namespace tomokit
