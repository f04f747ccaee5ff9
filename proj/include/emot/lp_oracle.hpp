#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "emot/problem.hpp"

namespace emot {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };
const char* lp_status_name(LpStatus s);

// min c.x  subject to  A x = b, x >= 0.
struct StandardFormLp {
  Eigen::MatrixXd a;
  Vector b;
  Vector c;
};

struct SimplexResult {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double objective = 0.0;
  std::vector<std::size_t> basis;  // column per kept row
  std::vector<std::size_t> rows;   // original rows kept after dropping redundant ones
  Vector duals;                    // one per kept row, from B^T y = c_B
  std::size_t pivots = 0;
};

// Two-phase dense-tableau simplex with Bland's rule. Rows are sign-normalized
// so b >= 0; redundant rows found after phase I are dropped.
SimplexResult simplex_solve(const StandardFormLp& lp);

// Largest violation of dual feasibility (c - A^T y >= 0 on kept rows) or of
// complementary slackness x_j (c - A^T y)_j = 0.
double complementary_slackness_gap(const StandardFormLp& lp,
                                   const SimplexResult& res);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  DenseMatrix p;  // n x n plan
  DenseMatrix e;  // n x d violation allowance (MOT only, empty for SMOT)
  double objective = 0.0;
  double cs_gap = 0.0;  // complementary slackness gap of the certificate
};

inline constexpr std::size_t kLpMaxSites = 16;

// Standard-form expansions. MOT columns: P (row-major), E, S, T (column-major
// over n x d, i fastest), q. Rows: row sums, column sums, PV - E + S = W,
// PV + E - T = W, sum E + q = epsilon. SMOT: P, S with PV - S = W.
StandardFormLp mot_standard_form(const MotProblem& prob);
StandardFormLp smot_standard_form(const SmotProblem& prob);
// Plain optimal transport with the same marginals and cost.
StandardFormLp ot_standard_form(const DenseMatrix& cost, const Vector& r,
                                const Vector& c);

// Require n <= 16; throw kInvalidArgument otherwise. Eta is ignored.
LpSolution solve_lp_mot(const MotProblem& prob);
LpSolution solve_lp_smot(const SmotProblem& prob);
LpSolution solve_lp_ot(const DenseMatrix& cost, const Vector& r, const Vector& c);

// Random instance that is feasible by construction: generic marginals, target
// points v ~ Unif[0,1]^d, W = Q V for a coupling Q of (r, c) obtained by matrix
// scaling of a random positive kernel, and cost entries ~ cost_scale*Unif[0,1].
MotProblem random_feasible_mot(std::size_t n, std::size_t d, double cost_scale,
                               double epsilon, std::uint64_t seed);

struct DecayPoint {
  double eta = 0.0;
  double gap = 0.0;  // ||P*_eta - P*||_1
};

// For each eta, solves the entropic problem to full accuracy with exact
// Newton and measures the L1 distance to the LP optimum. The LP optimum must
// be unique: the cost is jittered by 1e-9 and the LP re-solved; a changed
// support raises kOracleAmbiguity. Requires n <= 8.
std::vector<DecayPoint> theorem1_decay_probe(const MotProblem& tmpl,
                                             const std::vector<double>& etas);

// Least-squares line y = intercept + slope * x with coefficient of
// determination.
struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
AffineFit fit_affine(const std::vector<double>& x, const std::vector<double>& y);

// log(gap) against eta for a probe run.
AffineFit fit_log_gap(const std::vector<DecayPoint>& points);
bool strictly_decreasing(const std::vector<DecayPoint>& points);

}  // namespace emot
