#include "emot/smot_dual.hpp"

#include <cmath>

#include "emot/errors.hpp"
#include "plan_terms.hpp"

namespace emot {

SmotDual SmotDual::zeros(std::size_t n, std::size_t d) {
  SmotDual z;
  z.x = Vector::Zero(n);
  z.y = Vector::Zero(n);
  z.a = DenseMatrix::Zero(n, d);
  return z;
}

Vector SmotDual::pack() const {
  const std::size_t n = static_cast<std::size_t>(x.size());
  const std::size_t d = static_cast<std::size_t>(a.cols());
  Vector z(smot_dual_dim(n, d));
  z.head(n) = x;
  z.segment(n, n) = y;
  for (std::size_t k = 0; k < d; ++k) z.segment(2 * n + k * n, n) = a.col(k);
  return z;
}

SmotDual SmotDual::unpack(const Vector& z, std::size_t n, std::size_t d) {
  if (static_cast<std::size_t>(z.size()) != smot_dual_dim(n, d)) {
    throw Error(ErrorCode::kSizeMismatch, "SMOT dual vector has wrong length");
  }
  SmotDual out;
  out.x = z.head(n);
  out.y = z.segment(n, n);
  out.a.resize(n, d);
  for (std::size_t k = 0; k < d; ++k) out.a.col(k) = z.segment(2 * n + k * n, n);
  return out;
}

namespace {

DenseMatrix slack(const DenseMatrix& a, double eta, bool* clamped) {
  DenseMatrix s(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      s(i, k) = capped_exp(-eta * a(i, k) - 1.0, clamped);
    }
  }
  return s;
}

}  // namespace

SmotPotential::SmotPotential(const SmotProblem& problem) : prob_(problem) {
  prob_.validate();
}

DenseMatrix SmotPotential::log_plan(const Vector& z) const {
  const SmotDual dual = SmotDual::unpack(z, prob_.n, prob_.d);
  return detail::plan_log(prob_.cost, dual.a, prob_.v, dual.x, dual.y, prob_.eta);
}

Evaluation SmotPotential::evaluate(const Vector& z) const {
  const SmotDual dual = SmotDual::unpack(z, prob_.n, prob_.d);
  const double eta = prob_.eta;
  const auto plan = detail::plan_terms(
      detail::plan_log(prob_.cost, dual.a, prob_.v, dual.x, dual.y, eta), prob_.v);
  bool slack_clamped = false;
  const DenseMatrix s = slack(dual.a, eta, &slack_clamped);

  CompensatedSum g;
  g.add(-plan.total / eta);
  for (std::size_t i = 0; i < prob_.n; ++i) {
    g.add(dual.x(i) * prob_.r(i));
    g.add(dual.y(i) * prob_.c(i));
    for (std::size_t k = 0; k < prob_.d; ++k) {
      g.add(dual.a(i, k) * prob_.w(i, k));
      g.add(-s(i, k) / eta);
    }
  }
  Evaluation out;
  out.value = g.value();
  if (plan.clamped) {
    out.clamped = true;
    out.offending = "plan";
  } else if (slack_clamped) {
    out.clamped = true;
    out.offending = "s_slack";
  }
  return out;
}

Vector SmotPotential::gradient(const Vector& z) const {
  const SmotDual dual = SmotDual::unpack(z, prob_.n, prob_.d);
  const double eta = prob_.eta;
  const auto plan = detail::plan_terms(
      detail::plan_log(prob_.cost, dual.a, prob_.v, dual.x, dual.y, eta), prob_.v);
  SmotDual g;
  g.x = prob_.r - plan.row_sums;
  g.y = prob_.c - plan.col_sums;
  g.a = prob_.w - plan.pv + slack(dual.a, eta, nullptr);
  return g.pack();
}

SparseSymMatrix SmotPotential::assemble(const Vector& z,
                                        const HessianOptions& opts,
                                        bool include_y) const {
  const SmotDual dual = SmotDual::unpack(z, prob_.n, prob_.d);
  const std::size_t n = prob_.n;
  const double eta = prob_.eta;
  const auto plan = detail::plan_terms(
      detail::plan_log(prob_.cost, dual.a, prob_.v, dual.x, dual.y, eta), prob_.v);
  const DenseMatrix s = slack(dual.a, eta, nullptr);

  detail::EntryList entries({n, !include_y});
  std::vector<std::size_t> kept;
  const std::vector<std::size_t>* cross = nullptr;
  if (include_y && opts.mode == HessianMode::kSparsified) {
    kept = top_k_threshold(plan.p, sparsified_count(n, opts.rho)).kept;
    cross = &kept;
  }
  detail::add_plan_hessian(entries, plan, cross, prob_.v, 1, eta, include_y);
  for (std::size_t k = 0; k < prob_.d; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ai = 2 * n + k * n + i;
      entries.add(ai, ai, -eta * s(i, k));
    }
  }
  return entries.build(include_y ? dim() : dim() - n);
}

SparseSymMatrix SmotPotential::hessian(const Vector& z,
                                       const HessianOptions& opts) const {
  if (opts.mode == HessianMode::kSparsified && !(opts.rho > 0.0 && opts.rho <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rho must lie in (0, 1]");
  }
  return assemble(z, opts, true);
}

SparseSymMatrix SmotPotential::block_hessian(const Vector& z) const {
  return assemble(z, HessianOptions::exact(), false);
}

DenseMatrix log_plan(const SmotProblem& prob, const SmotDual& z) {
  return SmotPotential(prob).log_plan(z.pack());
}

double eval_g(const SmotProblem& prob, const SmotDual& z) {
  return checked_value(SmotPotential(prob).evaluate(z.pack()));
}

SmotDual grad_g(const SmotProblem& prob, const SmotDual& z) {
  const SmotPotential g(prob);
  const Vector packed = z.pack();
  checked_value(g.evaluate(packed));
  return SmotDual::unpack(g.gradient(packed), prob.n, prob.d);
}

SparseSymMatrix hessian_g(const SmotProblem& prob, const SmotDual& z,
                          const HessianOptions& opts) {
  return SmotPotential(prob).hessian(z.pack(), opts);
}

SmotRecovery recover_primal_smot(const SmotProblem& prob, const SmotDual& z) {
  const auto plan = detail::plan_terms(log_plan(prob, z), prob.v);
  bool clamped = plan.clamped;
  SmotRecovery rec;
  rec.s = slack(z.a, prob.eta, &clamped);
  if (clamped) {
    throw Error(ErrorCode::kPotentialOverflow, plan.clamped ? "plan" : "s_slack");
  }
  rec.p = plan.p;
  return rec;
}

}  // namespace emot
