#include "emot/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <type_traits>

#include "emot/apdagd.hpp"
#include "emot/errors.hpp"
#include "emot/sinkhorn.hpp"
#include "emot/sparse_newton.hpp"

namespace emot {

SolverKind parse_solver(const std::string& name) {
  if (name == "sinkhorn") return SolverKind::kSinkhorn;
  if (name == "sns") return SolverKind::kSns;
  if (name == "apdagd") return SolverKind::kApdagd;
  throw Error(ErrorCode::kInvalidArgument, "unknown solver '" + name + "'");
}

const char* solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::kSinkhorn: return "sinkhorn";
    case SolverKind::kSns: return "sns";
    case SolverKind::kApdagd: return "apdagd";
  }
  return "unknown";
}

namespace {

std::string real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Stopwatch {
 public:
  explicit Stopwatch(bool on) : on_(on), start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    if (!on_) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start_)
        .count();
  }

 private:
  bool on_;
  std::chrono::steady_clock::time_point start_;
};

template <typename Problem, typename Potential, typename Dual>
RunOutput solve_generic(const Problem& prob, const SolveRequest& req) {
  prob.validate();
  RunOutput out{Vector(), DenseMatrix(), ConvergenceTrace(req.timing), RunSummary()};
  RunSummary& s = out.summary;
  s.solver = solver_name(req.solver);
  s.problem = req.problem_id;
  s.seed = req.seed;
  s.n = prob.n;
  s.d = prob.d;
  s.eta = prob.eta;

  Stopwatch warm_clock(req.timing);
  Vector z0 = Dual::zeros(prob.n, prob.d).pack();
  double warm_column_error = 0.0;
  if (req.warm_start) {
    EtaSchedule sched{req.eta0, prob.eta, req.iters_per_level};
    s.warm_levels = sched.level_count();
    z0 = warm_init(prob, sched, 3, &warm_column_error).pack();
  }
  s.warm_ms = warm_clock.ms();

  const Potential f(prob);
  if (req.reference) {
    SnsConfig ref;
    ref.n1 = prob.n;
    ref.n2 = 50;
    ref.rho = 1.0;
    ref.grad_tol = 1e-13;
    const SolveResult r = run_sns(f, z0, ref);
    s.reference_grad_inf = r.grad_inf;
    out.trace.set_reference(plan_at(f, r.z));
  }

  Stopwatch solve_clock(req.timing);
  switch (req.solver) {
    case SolverKind::kSinkhorn: {
      SinkhornConfig cfg;
      cfg.max_outer = req.iters > 0 ? req.iters : 100;
      cfg.grad_tol = req.tol;
      SolveResult r = run_sinkhorn(f, z0, cfg, &out.trace);
      out.z = std::move(r.z);
      s.status = status_name(r.status);
      s.converged = r.status == SolveStatus::kConverged;
      s.sinkhorn_iterations = r.stats.sinkhorn_iterations;
      s.max_column_error = r.stats.max_column_error;
      s.message = r.message;
      break;
    }
    case SolverKind::kSns: {
      SnsConfig cfg;
      cfg.n1 = req.n1;
      cfg.n2 = req.n2;
      cfg.rho = req.rho;
      cfg.grad_tol = req.tol;
      SolveResult r = run_sns(f, z0, cfg, &out.trace);
      out.z = std::move(r.z);
      s.status = status_name(r.status);
      s.converged = r.status == SolveStatus::kConverged;
      s.sinkhorn_iterations = r.stats.sinkhorn_iterations;
      s.newton_iterations = r.stats.newton_iterations;
      s.max_column_error = r.stats.max_column_error;
      s.message = r.message;
      break;
    }
    case SolverKind::kApdagd: {
      ApdagdConfig cfg;
      cfg.max_iter = req.iters > 0 ? req.iters : 500;
      cfg.grad_tol = req.tol;
      ApdagdResult r = run_apdagd(f, z0, cfg, &out.trace);
      out.z = std::move(r.z);
      s.converged = r.converged;
      s.status = r.converged ? "converged" : "max_iterations";
      s.apdagd_iterations = r.iterations;
      break;
    }
  }
  s.solve_ms = solve_clock.ms();
  s.max_column_error = std::max(s.max_column_error, warm_column_error);

  s.objective = checked_value(f.evaluate(out.z));
  s.grad_inf = f.gradient(out.z).template lpNorm<Eigen::Infinity>();
  out.plan = plan_at(f, out.z);
  s.row_error = (out.plan.rowwise().sum() - prob.r).template lpNorm<1>();
  s.col_error = (out.plan.colwise().sum().transpose() - prob.c).template lpNorm<1>();
  const DenseMatrix residual = out.plan * prob.v - prob.w;
  if constexpr (std::is_same_v<Problem, MotProblem>) {
    s.epsilon = prob.epsilon;
    s.violation_kind = "l1";
    s.violation = residual.cwiseAbs().sum();
  } else {
    s.violation_kind = "min";
    s.violation = residual.minCoeff();
  }
  if (out.trace.has_reference() && !out.trace.empty()) {
    s.l1_to_ref = out.trace.records().back().l1_to_ref;
  }
  return out;
}

}  // namespace

std::string RunSummary::to_text() const {
  std::string t;
  auto kv = [&t](const std::string& k, const std::string& v) { t += k + " = " + v + "\n"; };
  kv("solver", solver);
  kv("problem", problem);
  kv("seed", std::to_string(seed));
  kv("n", std::to_string(n));
  kv("d", std::to_string(d));
  kv("eta", real(eta));
  if (epsilon) kv("epsilon", real(*epsilon));
  kv("status", status);
  kv("converged", converged ? "true" : "false");
  kv("objective", real(objective));
  kv("grad_inf", real(grad_inf));
  kv("row_error", real(row_error));
  kv("col_error", real(col_error));
  kv("violation_kind", violation_kind);
  kv("violation", real(violation));
  kv("warm_levels", std::to_string(warm_levels));
  kv("sinkhorn_iterations", std::to_string(sinkhorn_iterations));
  kv("newton_iterations", std::to_string(newton_iterations));
  kv("apdagd_iterations", std::to_string(apdagd_iterations));
  kv("max_column_error", real(max_column_error));
  if (l1_to_ref) kv("l1_to_ref", real(*l1_to_ref));
  if (reference_grad_inf) kv("reference_grad_inf", real(*reference_grad_inf));
  kv("warm_ms", real(warm_ms));
  kv("solve_ms", real(solve_ms));
  if (!message.empty()) kv("message", message);
  return t;
}

RunOutput solve_mot(const MotProblem& prob, const SolveRequest& req) {
  return solve_generic<MotProblem, MotPotential, MotDual>(prob, req);
}

RunOutput solve_smot(const SmotProblem& prob, const SolveRequest& req) {
  return solve_generic<SmotProblem, SmotPotential, SmotDual>(prob, req);
}

Vector expected_positions(const DenseMatrix& p) {
  Vector out(p.cols());
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    double mass = 0.0, weighted = 0.0;
    for (Eigen::Index k = 0; k < p.rows(); ++k) {
      mass += p(k, j);
      weighted += p(k, j) * static_cast<double>(k + 1);
    }
    if (!(mass > 0.0)) {
      throw Error(ErrorCode::kZeroColumn, "column " + std::to_string(j) + " has no mass");
    }
    out(j) = weighted / mass;
  }
  return out;
}

}  // namespace emot
