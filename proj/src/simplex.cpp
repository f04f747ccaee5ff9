#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "emot/errors.hpp"
#include "emot/lp_oracle.hpp"

namespace emot {

const char* lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-11;
constexpr std::size_t kMaxPivots = 200000;

struct Tableau {
  Eigen::MatrixXd t;                // rows x (cols + 1), last column is rhs
  std::vector<std::size_t> basis;
  std::vector<std::size_t> rows;    // original row of each tableau row
  std::size_t cols = 0;             // structural + artificial columns
  std::size_t pivots = 0;

  double rhs(std::size_t i) const { return t(i, t.cols() - 1); }

  void pivot(std::size_t r, std::size_t col) {
    t.row(r) /= t(r, col);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      if (i == static_cast<Eigen::Index>(r)) continue;
      const double f = t(i, col);
      if (f != 0.0) t.row(i) -= f * t.row(r);
    }
    basis[r] = col;
    ++pivots;
  }

  void drop_row(std::size_t r) {
    const Eigen::Index last = t.rows() - 1;
    Eigen::MatrixXd next(last, t.cols());
    next.topRows(r) = t.topRows(r);
    next.bottomRows(last - r) = t.bottomRows(last - r);
    t = std::move(next);
    basis.erase(basis.begin() + r);
    rows.erase(rows.begin() + r);
  }
};

enum class PhaseOutcome { kOptimal, kUnbounded };

// Bland's rule: lowest-index improving column, lowest-index leaving basic
// variable among ratio-test ties.
PhaseOutcome run_phase(Tableau& tab, const Vector& cost, std::size_t allowed) {
  const Eigen::Index m = tab.t.rows();
  while (true) {
    if (tab.pivots > kMaxPivots) {
      throw Error(ErrorCode::kInvalidArgument, "simplex pivot limit exceeded");
    }
    Vector cb(m);
    for (Eigen::Index i = 0; i < m; ++i) cb(i) = cost(tab.basis[i]);
    std::size_t enter = allowed;
    for (std::size_t j = 0; j < allowed; ++j) {
      const double rc = cost(j) - cb.dot(tab.t.col(j));
      if (rc < -kCostTol) {
        enter = j;
        break;
      }
    }
    if (enter == allowed) return PhaseOutcome::kOptimal;

    std::size_t leave = static_cast<std::size_t>(m);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = tab.t(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = tab.rhs(i) / a;
      if (leave == static_cast<std::size_t>(m)) {
        best = ratio;
        leave = static_cast<std::size_t>(i);
        continue;
      }
      const bool tie = std::abs(ratio - best) <= 1e-13 * std::max(1.0, std::abs(best));
      if (ratio < best && !tie) {
        best = ratio;
        leave = static_cast<std::size_t>(i);
      } else if (tie && tab.basis[i] < tab.basis[leave]) {
        leave = static_cast<std::size_t>(i);
      }
    }
    if (leave == static_cast<std::size_t>(m)) return PhaseOutcome::kUnbounded;
    tab.pivot(leave, enter);
  }
}

}  // namespace

SimplexResult simplex_solve(const StandardFormLp& lp) {
  const Eigen::Index m = lp.a.rows();
  const Eigen::Index nvar = lp.a.cols();
  if (lp.b.size() != m || lp.c.size() != nvar) {
    throw Error(ErrorCode::kSizeMismatch, "LP data dimensions disagree");
  }
  Tableau tab;
  tab.cols = static_cast<std::size_t>(nvar + m);
  tab.t = Eigen::MatrixXd::Zero(m, nvar + m + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = lp.b(i) < 0.0 ? -1.0 : 1.0;
    tab.t.row(i).head(nvar) = sign * lp.a.row(i);
    tab.t(i, nvar + i) = 1.0;
    tab.t(i, nvar + m) = sign * lp.b(i);
    tab.basis.push_back(static_cast<std::size_t>(nvar + i));
    tab.rows.push_back(static_cast<std::size_t>(i));
  }

  SimplexResult res;
  // Phase I: minimize the sum of artificials.
  Vector phase1 = Vector::Zero(nvar + m);
  phase1.tail(m).setOnes();
  run_phase(tab, phase1, tab.cols);
  double infeas = 0.0;
  for (Eigen::Index i = 0; i < tab.t.rows(); ++i) {
    if (tab.basis[i] >= static_cast<std::size_t>(nvar)) infeas += tab.rhs(i);
  }
  if (infeas > 1e-9 * (1.0 + lp.b.lpNorm<1>())) {
    res.status = LpStatus::kInfeasible;
    res.pivots = tab.pivots;
    return res;
  }
  // Drive remaining (zero-level) artificials out, dropping redundant rows.
  for (Eigen::Index i = tab.t.rows() - 1; i >= 0; --i) {
    if (tab.basis[i] < static_cast<std::size_t>(nvar)) continue;
    Eigen::Index col = -1;
    for (Eigen::Index j = 0; j < nvar; ++j) {
      if (std::abs(tab.t(i, j)) > 1e-9) {
        col = j;
        break;
      }
    }
    if (col < 0) {
      tab.drop_row(static_cast<std::size_t>(i));
    } else {
      tab.pivot(static_cast<std::size_t>(i), static_cast<std::size_t>(col));
    }
  }

  Vector phase2 = Vector::Zero(nvar + m);
  phase2.head(nvar) = lp.c;
  if (run_phase(tab, phase2, static_cast<std::size_t>(nvar)) ==
      PhaseOutcome::kUnbounded) {
    res.status = LpStatus::kUnbounded;
    res.pivots = tab.pivots;
    return res;
  }

  // Recompute the basic solution and duals from the original data.
  const Eigen::Index k = tab.t.rows();
  Eigen::MatrixXd bmat(k, k);
  Vector bk(k), cb(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index r = 0; r < k; ++r) bmat(r, i) = lp.a(tab.rows[r], tab.basis[i]);
    bk(i) = lp.b(tab.rows[i]);
    cb(i) = lp.c(tab.basis[i]);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
  const Vector xb = lu.solve(bk);
  res.duals = lu.transpose().solve(cb);
  res.x = Vector::Zero(nvar);
  for (Eigen::Index i = 0; i < k; ++i) res.x(tab.basis[i]) = std::max(0.0, xb(i));
  res.objective = lp.c.dot(res.x);
  res.basis = tab.basis;
  res.rows = tab.rows;
  res.status = LpStatus::kOptimal;
  res.pivots = tab.pivots;
  return res;
}

double complementary_slackness_gap(const StandardFormLp& lp,
                                   const SimplexResult& res) {
  if (res.status != LpStatus::kOptimal) return 0.0;
  Vector aty = Vector::Zero(lp.a.cols());
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    aty += res.duals(static_cast<Eigen::Index>(i)) * lp.a.row(res.rows[i]).transpose();
  }
  double gap = 0.0;
  for (Eigen::Index j = 0; j < lp.a.cols(); ++j) {
    const double rc = lp.c(j) - aty(j);
    gap = std::max(gap, -rc);
    gap = std::max(gap, std::abs(res.x(j) * rc));
  }
  return gap;
}

}  // namespace emot
