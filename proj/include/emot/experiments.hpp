#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "emot/mot_dual.hpp"
#include "emot/schedule.hpp"
#include "emot/smot_dual.hpp"
#include "emot/trace.hpp"

namespace emot {

enum class SolverKind { kSinkhorn, kSns, kApdagd };
SolverKind parse_solver(const std::string& name);
const char* solver_name(SolverKind s);

struct SolveRequest {
  SolverKind solver = SolverKind::kSns;
  std::size_t n1 = 20;
  std::size_t n2 = 10;
  std::optional<double> rho;
  double tol = 1e-10;
  std::size_t iters = 0;        // sinkhorn/apdagd iteration cap; 0 = default
  bool warm_start = true;
  double eta0 = 12.5;
  std::size_t iters_per_level = 5;
  bool reference = false;       // fill l1_to_ref with a full-Newton reference
  bool timing = false;
  std::uint64_t seed = 0;       // recorded only
  std::string problem_id = "custom";
};

// Flat record written as the summary file.
struct RunSummary {
  std::string solver;
  std::string problem;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  double eta = 0.0;
  std::optional<double> epsilon;  // MOT only
  std::string status;
  bool converged = false;
  double objective = 0.0;
  double grad_inf = 0.0;
  double row_error = 0.0;         // ||P1 - r||_1
  double col_error = 0.0;         // ||P^T 1 - c||_1
  std::string violation_kind;     // "l1" (||PV - W||_1) or "min" (min(PV - W))
  double violation = 0.0;
  std::size_t warm_levels = 0;
  std::size_t sinkhorn_iterations = 0;
  std::size_t newton_iterations = 0;
  std::size_t apdagd_iterations = 0;
  double max_column_error = 0.0;  // over warm start and solve
  std::optional<double> l1_to_ref;
  std::optional<double> reference_grad_inf;  // how well the reference solved
  double warm_ms = 0.0;
  double solve_ms = 0.0;
  std::string message;

  // "key = value" lines, reals printed with %.17g.
  std::string to_text() const;
};

struct RunOutput {
  Vector z;
  DenseMatrix plan;
  ConvergenceTrace trace;
  RunSummary summary;
};

RunOutput solve_mot(const MotProblem& prob, const SolveRequest& req);
RunOutput solve_smot(const SmotProblem& prob, const SolveRequest& req);

// Position j -> sum_k P_kj k / sum_k P_kj with positions numbered from 1.
// Throws kZeroColumn for a column without mass.
Vector expected_positions(const DenseMatrix& p);

}  // namespace emot
