#pragma once

#include <cstddef>
#include <optional>

#include "emot/dual.hpp"
#include "emot/sinkhorn.hpp"

namespace emot {

// min(1, 5 * (2n - 1 + n d) / n^2): five times the support size of a basic
// solution.
double default_rho(std::size_t n, std::size_t d);

struct SnsConfig {
  std::size_t n1 = 20;            // Sinkhorn-type warm-up iterations
  std::size_t n2 = 10;            // Newton iterations
  std::optional<double> rho;      // defaults to default_rho(n, d)
  double grad_tol = 1e-10;
  std::size_t inner_newton = 3;   // block steps per warm-up iteration
  LineSearchParams line_search;

  void validate() const;
};

// Full Hessian whose (x,y) and (y, constraint) cross blocks only use the
// ceil(rho n^2) largest plan entries.
SparseSymMatrix sparsify_hessian(const DualPotential& f, const Vector& z,
                                 double rho);

// Warm-up with run_sinkhorn for n1 iterations, then up to n2 Newton steps on
// the sparsified Hessian. Trace stages are "sinkhorn" then "newton".
//
// f is invariant under (x + t, y - t), so the full Hessian is singular along
// that direction; the last y coordinate is held fixed in each Newton solve.
SolveResult run_sns(const DualPotential& f, const Vector& z0,
                    const SnsConfig& cfg, ConvergenceTrace* trace = nullptr);

}  // namespace emot
