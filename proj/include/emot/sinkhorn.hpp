#pragma once

#include <cstddef>
#include <string>

#include "emot/dual.hpp"
#include "emot/line_search.hpp"
#include "emot/trace.hpp"

namespace emot {

struct SinkhornConfig {
  std::size_t max_outer = 100;
  std::size_t inner_newton = 3;
  double grad_tol = 1e-10;
  LineSearchParams line_search;

  void validate() const;
};

enum class SolveStatus { kConverged, kMaxIterations, kStagnated };
const char* status_name(SolveStatus s);

// Instrumentation gathered while solving.
struct SolveStats {
  std::size_t column_scalings = 0;
  double max_column_error = 0.0;       // ||P^T 1 - c||_1 right after scaling
  std::size_t max_block_nonzeros = 0;  // stored nonzeros of block systems
  std::size_t max_newton_nonzeros = 0; // stored nonzeros of full Newton systems
  std::size_t gradient_fallbacks = 0;
  std::size_t sinkhorn_iterations = 0;
  std::size_t newton_iterations = 0;
};

struct SolveResult {
  Vector z;
  double objective = 0.0;
  double grad_inf = 0.0;
  SolveStatus status = SolveStatus::kMaxIterations;
  std::string message;  // diagnostic when stagnated
  SolveStats stats;
};

struct ColumnScale {
  Vector z;
  double column_error = 0.0;  // ||P^T 1 - c||_1 after the update
};

// Exact maximization over y: y += (log c - log(P^T 1)) / eta, in log domain.
// Throws kColumnUnderflow if some column of P has no representable mass.
ColumnScale column_scale(const DualPotential& f, const Vector& z);

struct BlockStep {
  Vector z;
  double value = 0.0;
  double alpha = 0.0;
  bool used_fallback = false;
  std::size_t block_nonzeros = 0;
};

// One Newton step on every variable except y, with Armijo backtracking.
BlockStep inner_block_step(const DualPotential& f, const Vector& z,
                           const LineSearchParams& params);

// Alternates column scaling with `inner_newton` block steps per outer
// iteration. Records one trace row per outer iteration (stage "sinkhorn").
SolveResult run_sinkhorn(const DualPotential& f, const Vector& z0,
                         const SinkhornConfig& cfg,
                         ConvergenceTrace* trace = nullptr);

}  // namespace emot
