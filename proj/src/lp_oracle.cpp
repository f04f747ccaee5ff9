#include "emot/lp_oracle.hpp"

#include <cmath>
#include <string>

#include "emot/errors.hpp"
#include "emot/mot_dual.hpp"
#include "emot/random.hpp"
#include "emot/sparse_newton.hpp"
#include "emot/trace.hpp"

namespace emot {

namespace {

void check_size(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw Error(ErrorCode::kInvalidArgument,
                "LP oracle limited to n <= " + std::to_string(cap) + ", got " +
                    std::to_string(n));
  }
}

// Transport rows shared by every expansion: row sums then column sums over the
// first n*n (row-major plan) columns.
void add_marginals(Eigen::MatrixXd& a, Vector& b, std::size_t n, const Vector& r,
                   const Vector& c) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a(i, i * n + j) = 1.0;
      a(n + j, i * n + j) = 1.0;
    }
    b(i) = r(i);
    b(n + i) = c(i);
  }
}

// Adds (PV)_ik to row `row` for plan columns.
void add_pv(Eigen::MatrixXd& a, std::size_t row, std::size_t i, std::size_t k,
            std::size_t n, const DenseMatrix& v) {
  for (std::size_t j = 0; j < n; ++j) a(row, i * n + j) = v(j, k);
}

DenseMatrix plan_from(const Vector& x, std::size_t n) {
  DenseMatrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) p(i, j) = x(i * n + j);
  }
  return p;
}

Vector plan_cost(const DenseMatrix& cost) {
  Vector out(cost.size());
  for (Eigen::Index i = 0; i < cost.size(); ++i) out(i) = cost.data()[i];
  return out;
}

}  // namespace

StandardFormLp mot_standard_form(const MotProblem& prob) {
  prob.validate();
  const std::size_t n = prob.n, d = prob.d, nd = n * d;
  const std::size_t e0 = n * n, s0 = e0 + nd, t0 = s0 + nd, q = t0 + nd;
  const std::size_t rows = 2 * n + 2 * nd + 1;
  StandardFormLp lp;
  lp.a = Eigen::MatrixXd::Zero(rows, q + 1);
  lp.b = Vector::Zero(rows);
  lp.c = Vector::Zero(q + 1);
  lp.c.head(n * n) = plan_cost(prob.cost);
  add_marginals(lp.a, lp.b, n, prob.r, prob.c);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = k * n + i;
      const std::size_t upper = 2 * n + idx;       // PV - E + S = W
      const std::size_t lower = 2 * n + nd + idx;  // PV + E - T = W
      add_pv(lp.a, upper, i, k, n, prob.v);
      add_pv(lp.a, lower, i, k, n, prob.v);
      lp.a(upper, e0 + idx) = -1.0;
      lp.a(upper, s0 + idx) = 1.0;
      lp.a(lower, e0 + idx) = 1.0;
      lp.a(lower, t0 + idx) = -1.0;
      lp.b(upper) = prob.w(i, k);
      lp.b(lower) = prob.w(i, k);
      lp.a(rows - 1, e0 + idx) = 1.0;
    }
  }
  lp.a(rows - 1, q) = 1.0;
  lp.b(rows - 1) = prob.epsilon;
  return lp;
}

StandardFormLp smot_standard_form(const SmotProblem& prob) {
  prob.validate();
  const std::size_t n = prob.n, d = prob.d, nd = n * d;
  StandardFormLp lp;
  lp.a = Eigen::MatrixXd::Zero(2 * n + nd, n * n + nd);
  lp.b = Vector::Zero(2 * n + nd);
  lp.c = Vector::Zero(n * n + nd);
  lp.c.head(n * n) = plan_cost(prob.cost);
  add_marginals(lp.a, lp.b, n, prob.r, prob.c);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = k * n + i;
      add_pv(lp.a, 2 * n + idx, i, k, n, prob.v);  // PV - S = W
      lp.a(2 * n + idx, n * n + idx) = -1.0;
      lp.b(2 * n + idx) = prob.w(i, k);
    }
  }
  return lp;
}

StandardFormLp ot_standard_form(const DenseMatrix& cost, const Vector& r,
                                const Vector& c) {
  const std::size_t n = static_cast<std::size_t>(cost.rows());
  if (cost.cols() != cost.rows() || static_cast<std::size_t>(r.size()) != n ||
      static_cast<std::size_t>(c.size()) != n) {
    throw Error(ErrorCode::kSizeMismatch, "OT data dimensions disagree");
  }
  StandardFormLp lp;
  lp.a = Eigen::MatrixXd::Zero(2 * n, n * n);
  lp.b = Vector::Zero(2 * n);
  lp.c = plan_cost(cost);
  add_marginals(lp.a, lp.b, n, r, c);
  return lp;
}

LpSolution solve_lp_mot(const MotProblem& prob) {
  check_size(prob.n, kLpMaxSites);
  const StandardFormLp lp = mot_standard_form(prob);
  const SimplexResult res = simplex_solve(lp);
  LpSolution out;
  out.status = res.status;
  if (res.status != LpStatus::kOptimal) return out;
  const std::size_t n = prob.n;
  out.p = plan_from(res.x, n);
  out.e.resize(n, prob.d);
  for (std::size_t k = 0; k < prob.d; ++k) {
    for (std::size_t i = 0; i < n; ++i) out.e(i, k) = res.x(n * n + k * n + i);
  }
  out.objective = res.objective;
  out.cs_gap = complementary_slackness_gap(lp, res);
  return out;
}

LpSolution solve_lp_smot(const SmotProblem& prob) {
  check_size(prob.n, kLpMaxSites);
  const StandardFormLp lp = smot_standard_form(prob);
  const SimplexResult res = simplex_solve(lp);
  LpSolution out;
  out.status = res.status;
  if (res.status != LpStatus::kOptimal) return out;
  out.p = plan_from(res.x, prob.n);
  out.objective = res.objective;
  out.cs_gap = complementary_slackness_gap(lp, res);
  return out;
}

LpSolution solve_lp_ot(const DenseMatrix& cost, const Vector& r, const Vector& c) {
  check_size(static_cast<std::size_t>(cost.rows()), kLpMaxSites);
  const StandardFormLp lp = ot_standard_form(cost, r, c);
  const SimplexResult res = simplex_solve(lp);
  LpSolution out;
  out.status = res.status;
  if (res.status != LpStatus::kOptimal) return out;
  out.p = plan_from(res.x, static_cast<std::size_t>(cost.rows()));
  out.objective = res.objective;
  out.cs_gap = complementary_slackness_gap(lp, res);
  return out;
}

std::vector<DecayPoint> theorem1_decay_probe(const MotProblem& tmpl,
                                             const std::vector<double>& etas) {
  check_size(tmpl.n, 8);
  const LpSolution lp = solve_lp_mot(tmpl);
  if (lp.status != LpStatus::kOptimal) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("LP template is ") + lp_status_name(lp.status));
  }
  // Uniqueness: two independent cost jitters must land on the same plan.
  Rng rng(0x5eed);
  for (int trial = 0; trial < 2; ++trial) {
    MotProblem jittered = tmpl;
    for (Eigen::Index i = 0; i < jittered.cost.size(); ++i) {
      jittered.cost.data()[i] += 1e-9 * rng.uniform(-1.0, 1.0);
    }
    const LpSolution other = solve_lp_mot(jittered);
    if (other.status != LpStatus::kOptimal || l1_distance(other.p, lp.p) > 1e-6) {
      throw Error(ErrorCode::kOracleAmbiguity,
                  "LP optimum moves under a 1e-9 cost jitter");
    }
  }

  std::vector<DecayPoint> out;
  Vector z = MotDual::zeros(tmpl.n, tmpl.d).pack();
  SnsConfig cfg;
  cfg.n1 = 20;
  cfg.n2 = 200;
  cfg.rho = 1.0;
  cfg.grad_tol = 1e-14;
  for (double eta : etas) {
    // Continuation: each level starts from the previous solution.
    const MotPotential f(tmpl.with_eta(eta));
    const SolveResult res = run_sns(f, z, cfg);
    z = res.z;
    out.push_back({eta, l1_distance(plan_at(f, z), lp.p)});
  }
  return out;
}

MotProblem random_feasible_mot(std::size_t n, std::size_t d, double cost_scale,
                               double epsilon, std::uint64_t seed) {
  Rng rng(seed);
  MotProblem p;
  p.n = n;
  p.d = d;
  p.epsilon = epsilon;
  p.r.resize(n);
  p.c.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.r(i) = rng.uniform(0.5, 1.5);
  for (std::size_t i = 0; i < n; ++i) p.c(i) = rng.uniform(0.5, 1.5);
  p.r /= p.r.sum();
  p.c /= p.c.sum();
  p.v.resize(n, d);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < d; ++k) p.v(j, k) = rng.uniform();
  }
  DenseMatrix q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) q(i, j) = rng.uniform(0.1, 1.0);
  }
  for (int it = 0; it < 2000; ++it) {
    for (std::size_t i = 0; i < n; ++i) q.row(i) *= p.r(i) / q.row(i).sum();
    for (std::size_t j = 0; j < n; ++j) q.col(j) *= p.c(j) / q.col(j).sum();
  }
  p.w = q * p.v;
  p.cost.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) p.cost(i, j) = cost_scale * rng.uniform();
  }
  // Renormalize to the exact sums validate() expects.
  p.r /= p.r.sum();
  p.c /= p.c.sum();
  return p;
}

AffineFit fit_affine(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "affine fit needs >= 2 paired samples");
  }
  const double m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  AffineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

AffineFit fit_log_gap(const std::vector<DecayPoint>& points) {
  std::vector<double> x, y;
  for (const DecayPoint& p : points) {
    x.push_back(p.eta);
    y.push_back(std::log(p.gap));
  }
  return fit_affine(x, y);
}

bool strictly_decreasing(const std::vector<DecayPoint>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].gap > 0.0)) return false;
    if (i > 0 && !(points[i].gap < points[i - 1].gap)) return false;
  }
  return true;
}

}  // namespace emot
