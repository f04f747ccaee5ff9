#include "emot/sparse_newton.hpp"

#include <algorithm>
#include <string>

#include "emot/errors.hpp"

namespace emot {

double default_rho(std::size_t n, std::size_t d) {
  const double nn = static_cast<double>(n);
  const double support = 2.0 * nn - 1.0 + nn * static_cast<double>(d);
  return std::min(1.0, 5.0 * support / (nn * nn));
}

void SnsConfig::validate() const {
  if (n2 < 1) throw Error(ErrorCode::kInvalidArgument, "n2 must be >= 1");
  if (rho && !(*rho > 0.0 && *rho <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rho must lie in (0, 1]");
  }
  if (!(grad_tol >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "grad_tol must be >= 0");
  if (inner_newton < 1) {
    throw Error(ErrorCode::kInvalidArgument, "inner_newton must be >= 1");
  }
  line_search.validate();
}

SparseSymMatrix sparsify_hessian(const DualPotential& f, const Vector& z,
                                 double rho) {
  return f.hessian(z, HessianOptions::sparsified(rho));
}

namespace {

Vector drop(const Vector& v, std::size_t k) {
  Vector out(v.size() - 1);
  out.head(k) = v.head(k);
  out.tail(v.size() - 1 - k) = v.tail(v.size() - 1 - k);
  return out;
}

Vector reinsert_zero(const Vector& v, std::size_t k) {
  Vector out(v.size() + 1);
  out.head(k) = v.head(k);
  out(k) = 0.0;
  out.tail(v.size() - k) = v.tail(v.size() - k);
  return out;
}

double inf_norm(const Vector& v) { return v.lpNorm<Eigen::Infinity>(); }

}  // namespace

SolveResult run_sns(const DualPotential& f, const Vector& z0,
                    const SnsConfig& cfg, ConvergenceTrace* trace) {
  cfg.validate();
  const double rho = cfg.rho.value_or(default_rho(f.n(), f.d()));

  SolveResult res;
  res.z = z0;
  if (cfg.n1 > 0) {
    SinkhornConfig sc;
    sc.max_outer = cfg.n1;
    sc.inner_newton = cfg.inner_newton;
    sc.grad_tol = cfg.grad_tol;
    sc.line_search = cfg.line_search;
    res = run_sinkhorn(f, z0, sc, trace);
    if (res.status == SolveStatus::kConverged) return res;
    res.message.clear();
  }

  const std::size_t pin = f.y_offset() + f.n() - 1;
  for (std::size_t it = 0; it < cfg.n2; ++it) {
    const double fz = checked_value(f.evaluate(res.z));
    const Vector grad = f.gradient(res.z);
    if (inf_norm(grad) <= cfg.grad_tol) {
      res.objective = fz;
      res.grad_inf = inf_norm(grad);
      res.status = SolveStatus::kConverged;
      return res;
    }
    const SparseSymMatrix h = sparsify_hessian(f, res.z, rho).without_index(pin);
    res.stats.max_newton_nonzeros = std::max(res.stats.max_newton_nonzeros,
                                             h.stored_nonzeros());
    try {
      const SymSolve sol = solve_sym_escalating(h, -drop(grad, pin));
      const Vector dir = reinsert_zero(sol.x, pin);
      AscentStep step = armijo_ascent(f, res.z, fz, grad, dir, grad, cfg.line_search);
      if (step.used_fallback) ++res.stats.gradient_fallbacks;
      res.z = std::move(step.z);
      res.objective = step.value;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kLineSearchFailed &&
          e.code() != ErrorCode::kSingularSystem) {
        throw;
      }
      res.objective = fz;
      res.grad_inf = inf_norm(grad);
      res.status = SolveStatus::kStagnated;
      res.message = "newton iteration " + std::to_string(it + 1) + ": " + e.what();
      return res;
    }
    ++res.stats.newton_iterations;
    res.grad_inf = inf_norm(f.gradient(res.z));
    if (trace != nullptr) trace->record(f, res.z, "newton", res.objective, res.grad_inf);
    if (res.grad_inf <= cfg.grad_tol) {
      res.status = SolveStatus::kConverged;
      return res;
    }
  }
  res.status = SolveStatus::kMaxIterations;
  return res;
}

}  // namespace emot
