#include "emot/sinkhorn.hpp"

#include <cmath>
#include <limits>

#include "emot/errors.hpp"

namespace emot {

void SinkhornConfig::validate() const {
  if (max_outer < 1) throw Error(ErrorCode::kInvalidArgument, "max_outer must be >= 1");
  if (inner_newton < 1) {
    throw Error(ErrorCode::kInvalidArgument, "inner_newton must be >= 1");
  }
  if (!(grad_tol >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "grad_tol must be >= 0");
  line_search.validate();
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIterations: return "max_iterations";
    case SolveStatus::kStagnated: return "stagnated";
  }
  return "unknown";
}

ColumnScale column_scale(const DualPotential& f, const Vector& z) {
  const std::size_t n = f.n();
  const Vector& c = f.column_weights();
  const double eta = f.eta();
  const DenseMatrix log_p = f.log_plan(z);
  Vector lse;
  try {
    lse = log_sum_exp_cols(log_p);
  } catch (const Error& e) {
    throw Error(ErrorCode::kColumnUnderflow, e.what());
  }
  ColumnScale out{z, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lse(j))) {
      throw Error(ErrorCode::kColumnUnderflow,
                  "column " + std::to_string(j) + " has no representable mass");
    }
    out.z(f.y_offset() + j) += (std::log(c(j)) - lse(j)) / eta;
  }
  // Re-form the scaled columns to certify the projection.
  const DenseMatrix p = plan_at(f, out.z);
  const Vector col = p.colwise().sum().transpose();
  out.column_error = (col - c).lpNorm<1>();
  return out;
}

namespace {

// Drops y from a full-length vector.
Vector without_y(const Vector& v, std::size_t n) {
  Vector out(v.size() - n);
  out.head(n) = v.head(n);
  out.tail(v.size() - 2 * n) = v.tail(v.size() - 2 * n);
  return out;
}

Vector with_zero_y(const Vector& b, std::size_t n) {
  Vector out = Vector::Zero(b.size() + n);
  out.head(n) = b.head(n);
  out.tail(b.size() - n) = b.tail(b.size() - n);
  return out;
}

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

}  // namespace

BlockStep inner_block_step(const DualPotential& f, const Vector& z,
                           const LineSearchParams& params) {
  const std::size_t n = f.n();
  const double fz = checked_value(f.evaluate(z));
  const Vector grad = f.gradient(z);
  const Vector gb = without_y(grad, n);
  const SparseSymMatrix h = f.block_hessian(z);
  const SymSolve sol = solve_sym_escalating(h, -gb);
  const Vector dir = with_zero_y(sol.x, n);
  const Vector fallback = with_zero_y(gb, n);
  const AscentStep step = armijo_ascent(f, z, fz, grad, dir, fallback, params);
  return {step.z, step.value, step.alpha, step.used_fallback, h.stored_nonzeros()};
}

SolveResult run_sinkhorn(const DualPotential& f, const Vector& z0,
                         const SinkhornConfig& cfg, ConvergenceTrace* trace) {
  cfg.validate();
  if (static_cast<std::size_t>(z0.size()) != f.dim()) {
    throw Error(ErrorCode::kSizeMismatch, "initial dual has wrong length");
  }
  SolveResult res;
  res.z = z0;
  for (std::size_t it = 0; it < cfg.max_outer; ++it) {
    ColumnScale cs = column_scale(f, res.z);
    res.z = std::move(cs.z);
    ++res.stats.column_scalings;
    res.stats.max_column_error = std::max(res.stats.max_column_error, cs.column_error);

    bool failed = false;
    try {
      for (std::size_t k = 0; k < cfg.inner_newton; ++k) {
        BlockStep step = inner_block_step(f, res.z, cfg.line_search);
        res.z = std::move(step.z);
        res.stats.max_block_nonzeros =
            std::max(res.stats.max_block_nonzeros, step.block_nonzeros);
        if (step.used_fallback) ++res.stats.gradient_fallbacks;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kLineSearchFailed) throw;
      res.message = std::string("outer iteration ") + std::to_string(it + 1) +
                    ": " + e.what();
      failed = true;
    }
    ++res.stats.sinkhorn_iterations;

    res.objective = checked_value(f.evaluate(res.z));
    res.grad_inf = inf_norm(f.gradient(res.z));
    if (trace != nullptr) trace->record(f, res.z, "sinkhorn", res.objective, res.grad_inf);
    if (res.grad_inf <= cfg.grad_tol) {
      res.status = SolveStatus::kConverged;
      return res;
    }
    if (failed) {
      res.status = SolveStatus::kStagnated;
      return res;
    }
  }
  res.status = SolveStatus::kMaxIterations;
  return res;
}

}  // namespace emot
