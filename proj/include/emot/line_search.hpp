#pragma once

#include <cstddef>

#include "emot/dual.hpp"

namespace emot {

struct LineSearchParams {
  double beta = 0.5;   // shrink factor
  double c1 = 1e-4;    // sufficient-increase constant
  std::size_t max_backtracks = 50;

  void validate() const;
};

struct AscentStep {
  Vector z;
  double value = 0.0;
  double alpha = 0.0;
  bool used_fallback = false;
};

// Armijo backtracking for maximization along `direction`, starting at alpha=1.
// Candidates whose evaluation was clamped are rejected. A tiny tolerance of
// 1e-14 * (1 + |f|) is granted so steps taken at machine precision are not
// refused for rounding noise.
//
// If `direction` is not an ascent direction or no step is accepted, retries
// along `fallback` (normally the gradient restricted to the moving block).
// Throws kLineSearchFailed when both fail.
AscentStep armijo_ascent(const DualPotential& f, const Vector& z, double fz,
                         const Vector& grad, const Vector& direction,
                         const Vector& fallback, const LineSearchParams& params);

}  // namespace emot
