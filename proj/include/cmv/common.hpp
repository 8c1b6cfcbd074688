#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cmv {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Invalid parameters or configuration (maps to CLI exit code 1).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: solver non-convergence, overflow, resolvent blow-up
/// (maps to CLI exit code 2).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reduce an angle to [0, 2pi).
inline double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;  // fmod can land exactly on 2pi after the add
  return t;
}

inline Complex unit_circle(double theta) {
  return {std::cos(theta), std::sin(theta)};
}

inline bool is_unimodular(Complex z, double tol = 1e-12) {
  return std::abs(std::abs(z) - 1.0) <= tol;
}

}  // namespace cmv
