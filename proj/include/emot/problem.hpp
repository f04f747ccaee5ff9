#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "emot/numerics.hpp"

namespace emot {

// Entropic optimal transport with the martingale condition relaxed to
// ||PV - W||_1 <= epsilon.
//
// Rows of the plan index source sites (points w_i, weights r_i), columns
// index target sites (points v_j, weights c_j). V holds v_j as rows; W holds
// the scaled source targets r_i * w_i as rows.
struct MotProblem {
  std::size_t n = 0;
  std::size_t d = 0;
  DenseMatrix cost;  // n x n
  Vector r;          // source weights
  Vector c;          // target weights
  DenseMatrix v;     // n x d
  DenseMatrix w;     // n x d
  double epsilon = 0.0;
  double eta = 1.0;

  // Throws kSizeMismatch / kInvalidWeight / kInvalidArgument.
  void validate() const;
  MotProblem with_eta(double new_eta) const;
};

// Super-martingale variant: PV >= W.
struct SmotProblem {
  std::size_t n = 0;
  std::size_t d = 0;
  DenseMatrix cost;
  Vector r;
  Vector c;
  DenseMatrix v;
  DenseMatrix w;
  double eta = 1.0;

  void validate() const;
  SmotProblem with_eta(double new_eta) const;
};

// Point-mass approximation sum_i weights_i * delta_{points_i}.
struct QuantizedDistribution {
  DenseMatrix points;  // n x d
  Vector weights;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  void validate() const;
};

using CostFunction =
    std::function<double(const Eigen::Ref<const Eigen::RowVectorXd>& source,
                         const Eigen::Ref<const Eigen::RowVectorXd>& target)>;

// Sum of absolute coordinate differences.
double l1_cost(const Eigen::Ref<const Eigen::RowVectorXd>& a,
               const Eigen::Ref<const Eigen::RowVectorXd>& b);

// cost_ij = cost_fn(w_i, v_j), W row i = r_i * w_i, V row j = v_j.
MotProblem build_mot(const QuantizedDistribution& source,
                     const QuantizedDistribution& target,
                     const CostFunction& cost_fn, double epsilon, double eta);

// CDF of U + Y with U ~ Unif[0,1] and Y ~ N(0, sigma^2).
double smoothed_uniform_cdf(double t, double sigma);
// Inverts smoothed_uniform_cdf by bisection to 1e-12.
double smoothed_uniform_quantile(double p, double sigma);

inline constexpr double kOptionPricingSigma = 1e-2;

// Option-pricing instance: midpoint quantization of Unif[0,1] (source) and of
// Unif[0,1] + N(0, 1e-4) (target), cost |w_i - v_j|, epsilon defaults to 2/n.
MotProblem build_option_pricing(std::size_t n,
                                std::optional<double> epsilon, double eta);

// Random assignment with a balance constraint between the first size_a and
// the next size_b targets. Costs are i.i.d. Unif[0,1].
MotProblem build_balance(std::size_t n, std::size_t size_a, std::size_t size_b,
                         double epsilon, double eta, std::uint64_t seed);

// Ranking with a diversity floor: rows are positions 1..n, columns products.
// cost_ij = -alpha * s_j / log2(1 + i), alpha the ideal-DCG normalization;
// W row i = r_i * w_top for positions i <= k_top, else 0.
SmotProblem build_ranking_from_scores(const Vector& scores,
                                      const Vector& utilities,
                                      std::size_t k_top, double w_top,
                                      double eta);
// Draws scores then utilities i.i.d. Unif[0,1] from the seeded generator.
SmotProblem build_ranking(std::size_t n, std::size_t k_top, double w_top,
                          double eta, std::uint64_t seed);

inline constexpr std::size_t kRankingTopPositions = 39;
inline constexpr double kRankingThreshold = 0.3;
inline constexpr double kBalanceEpsilon = 0.1;

}  // namespace emot
