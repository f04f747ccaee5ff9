#pragma once

#include <cstddef>
#include <vector>

#include "emot/dual.hpp"
#include "emot/trace.hpp"

namespace emot {

struct ApdagdConfig {
  std::size_t max_iter = 500;
  double l0 = 1.0;
  std::size_t max_doublings = 60;
  double grad_tol = 0.0;        // early exit when > 0
  bool keep_iterates = false;   // store lambda/z per step for inspection

  void validate() const;
};

// One accepted outer step.
struct ApdagdStep {
  double m = 0.0;      // accepted smoothness estimate M_k
  double alpha = 0.0;  // alpha_{k+1}
  double beta = 0.0;   // beta_{k+1}
  Vector lambda;       // only with keep_iterates
  Vector z;            // only with keep_iterates
};

struct ApdagdResult {
  Vector z;
  double objective = 0.0;
  double grad_inf = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<ApdagdStep> history;
};

// Adaptive accelerated gradient ascent on a concave potential, started from
// z0 (zeta and lambda start there too). Overflowing trial points count as a
// failed acceptance test. Throws kAdaptiveStall after max_doublings.
ApdagdResult run_apdagd(const DualPotential& f, const Vector& z0,
                        const ApdagdConfig& cfg,
                        ConvergenceTrace* trace = nullptr);

}  // namespace emot
