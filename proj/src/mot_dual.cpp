#include "emot/mot_dual.hpp"

#include <cmath>

#include "emot/errors.hpp"
#include "plan_terms.hpp"

namespace emot {

MotDual MotDual::zeros(std::size_t n, std::size_t d) {
  MotDual z;
  z.x = Vector::Zero(n);
  z.y = Vector::Zero(n);
  z.a = DenseMatrix::Zero(n, d);
  z.b = DenseMatrix::Zero(n, d);
  z.u = 0.0;
  return z;
}

Vector MotDual::pack() const {
  const std::size_t n = static_cast<std::size_t>(x.size());
  const std::size_t d = static_cast<std::size_t>(a.cols());
  Vector z(mot_dual_dim(n, d));
  z.head(n) = x;
  z.segment(n, n) = y;
  for (std::size_t k = 0; k < d; ++k) {
    z.segment(2 * n + k * n, n) = a.col(k);
    z.segment(2 * n + (d + k) * n, n) = b.col(k);
  }
  z(z.size() - 1) = u;
  return z;
}

MotDual MotDual::unpack(const Vector& z, std::size_t n, std::size_t d) {
  if (static_cast<std::size_t>(z.size()) != mot_dual_dim(n, d)) {
    throw Error(ErrorCode::kSizeMismatch, "MOT dual vector has wrong length");
  }
  MotDual out;
  out.x = z.head(n);
  out.y = z.segment(n, n);
  out.a.resize(n, d);
  out.b.resize(n, d);
  for (std::size_t k = 0; k < d; ++k) {
    out.a.col(k) = z.segment(2 * n + k * n, n);
    out.b.col(k) = z.segment(2 * n + (d + k) * n, n);
  }
  out.u = z(z.size() - 1);
  return out;
}

namespace {

// exp of the four slack families at a dual point.
struct Slacks {
  DenseMatrix s, t, e;
  double q = 0.0;
  bool clamped = false;
  std::string offending;
};

Slacks slacks(const MotDual& z, double eta) {
  Slacks out;
  const Eigen::Index n = z.a.rows();
  const Eigen::Index d = z.a.cols();
  out.s.resize(n, d);
  out.t.resize(n, d);
  out.e.resize(n, d);
  auto take = [&](double arg, const char* name) {
    bool hit = false;
    const double v = capped_exp(arg, &hit);
    if (hit && !out.clamped) {
      out.clamped = true;
      out.offending = name;
    }
    return v;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      out.s(i, k) = take(eta * z.a(i, k) - 1.0, "s_slack");
      out.t(i, k) = take(-eta * z.b(i, k) - 1.0, "t_slack");
      out.e(i, k) = take(eta * (z.u - z.a(i, k) + z.b(i, k)) - 1.0, "e_slack");
    }
  }
  out.q = take(eta * z.u - 1.0, "q_slack");
  return out;
}

double entropy_term(double m) { return m > 0.0 ? m * std::log(m) : 0.0; }

}  // namespace

MotPotential::MotPotential(const MotProblem& problem) : prob_(problem) {
  prob_.validate();
}

DenseMatrix MotPotential::log_plan(const Vector& z) const {
  const MotDual dual = MotDual::unpack(z, prob_.n, prob_.d);
  return detail::plan_log(prob_.cost, dual.a + dual.b, prob_.v, dual.x, dual.y,
                          prob_.eta);
}

Evaluation MotPotential::evaluate(const Vector& z) const {
  const MotDual dual = MotDual::unpack(z, prob_.n, prob_.d);
  const double eta = prob_.eta;
  const auto plan = detail::plan_terms(
      detail::plan_log(prob_.cost, dual.a + dual.b, prob_.v, dual.x, dual.y, eta),
      prob_.v);
  const Slacks sl = slacks(dual, eta);

  CompensatedSum f;
  f.add(-plan.total / eta);
  for (std::size_t i = 0; i < prob_.n; ++i) {
    f.add(dual.x(i) * prob_.r(i));
    f.add(dual.y(i) * prob_.c(i));
    for (std::size_t k = 0; k < prob_.d; ++k) {
      f.add((dual.a(i, k) + dual.b(i, k)) * prob_.w(i, k));
      f.add(-(sl.s(i, k) + sl.t(i, k) + sl.e(i, k)) / eta);
    }
  }
  f.add(prob_.epsilon * dual.u);
  f.add(-sl.q / eta);

  Evaluation out;
  out.value = f.value();
  if (plan.clamped) {
    out.clamped = true;
    out.offending = "plan";
  } else if (sl.clamped) {
    out.clamped = true;
    out.offending = sl.offending;
  }
  return out;
}

Vector MotPotential::gradient(const Vector& z) const {
  const MotDual dual = MotDual::unpack(z, prob_.n, prob_.d);
  const double eta = prob_.eta;
  const auto plan = detail::plan_terms(
      detail::plan_log(prob_.cost, dual.a + dual.b, prob_.v, dual.x, dual.y, eta),
      prob_.v);
  const Slacks sl = slacks(dual, eta);

  MotDual g;
  g.x = prob_.r - plan.row_sums;
  g.y = prob_.c - plan.col_sums;
  const DenseMatrix common = prob_.w - plan.pv;
  g.a = common - sl.s + sl.e;
  g.b = common + sl.t - sl.e;
  g.u = prob_.epsilon - sl.q - sl.e.sum();
  return g.pack();
}

SparseSymMatrix MotPotential::assemble(const Vector& z,
                                       const HessianOptions& opts,
                                       bool include_y) const {
  const MotDual dual = MotDual::unpack(z, prob_.n, prob_.d);
  const std::size_t n = prob_.n;
  const std::size_t d = prob_.d;
  const double eta = prob_.eta;
  const auto plan = detail::plan_terms(
      detail::plan_log(prob_.cost, dual.a + dual.b, prob_.v, dual.x, dual.y, eta),
      prob_.v);
  const Slacks sl = slacks(dual, eta);

  detail::EntryList entries({n, !include_y});
  std::vector<std::size_t> kept;
  const std::vector<std::size_t>* cross = nullptr;
  if (include_y && opts.mode == HessianMode::kSparsified) {
    kept = top_k_threshold(plan.p, sparsified_count(n, opts.rho)).kept;
    cross = &kept;
  }
  detail::add_plan_hessian(entries, plan, cross, prob_.v, 2, eta, include_y);

  const std::size_t u = u_index();
  double uu = sl.q;
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ai = 2 * n + k * n + i;
      const std::size_t bi = 2 * n + (d + k) * n + i;
      const double e = sl.e(i, k);
      entries.add(ai, ai, -eta * (sl.s(i, k) + e));
      entries.add(bi, bi, -eta * (sl.t(i, k) + e));
      entries.add(ai, bi, eta * e);
      entries.add(ai, u, eta * e);
      entries.add(bi, u, -eta * e);
      uu += e;
    }
  }
  entries.add(u, u, -eta * uu);
  return entries.build(include_y ? dim() : dim() - n);
}

SparseSymMatrix MotPotential::hessian(const Vector& z,
                                      const HessianOptions& opts) const {
  if (opts.mode == HessianMode::kSparsified && !(opts.rho > 0.0 && opts.rho <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rho must lie in (0, 1]");
  }
  return assemble(z, opts, true);
}

SparseSymMatrix MotPotential::block_hessian(const Vector& z) const {
  return assemble(z, HessianOptions::exact(), false);
}

DenseMatrix log_plan(const MotProblem& prob, const MotDual& z) {
  return MotPotential(prob).log_plan(z.pack());
}

double eval_f(const MotProblem& prob, const MotDual& z) {
  return checked_value(MotPotential(prob).evaluate(z.pack()));
}

MotDual grad_f(const MotProblem& prob, const MotDual& z) {
  const MotPotential f(prob);
  const Vector packed = z.pack();
  checked_value(f.evaluate(packed));
  return MotDual::unpack(f.gradient(packed), prob.n, prob.d);
}

SparseSymMatrix hessian_f(const MotProblem& prob, const MotDual& z,
                          const HessianOptions& opts) {
  return MotPotential(prob).hessian(z.pack(), opts);
}

PrimalRecovery recover_primal(const MotProblem& prob, const MotDual& z) {
  const double eta = prob.eta;
  PrimalRecovery rec;
  const auto plan = detail::plan_terms(log_plan(prob, z), prob.v);
  const Slacks sl = slacks(z, eta);
  if (plan.clamped || sl.clamped) {
    throw Error(ErrorCode::kPotentialOverflow,
                plan.clamped ? "plan" : sl.offending);
  }
  rec.p = plan.p;
  rec.s = sl.s;
  rec.t = sl.t;
  rec.e = sl.e;
  rec.q = sl.q;
  return rec;
}

double primal_objective(const MotProblem& prob, const PrimalRecovery& rec) {
  CompensatedSum cost;
  CompensatedSum entropy;
  for (std::size_t i = 0; i < prob.n; ++i) {
    for (std::size_t j = 0; j < prob.n; ++j) {
      cost.add(prob.cost(i, j) * rec.p(i, j));
      entropy.add(entropy_term(rec.p(i, j)));
    }
    for (std::size_t k = 0; k < prob.d; ++k) {
      entropy.add(entropy_term(rec.e(i, k)));
      entropy.add(entropy_term(rec.s(i, k)));
      entropy.add(entropy_term(rec.t(i, k)));
    }
  }
  entropy.add(entropy_term(rec.q));
  return cost.value() + entropy.value() / prob.eta;
}

}  // namespace emot
