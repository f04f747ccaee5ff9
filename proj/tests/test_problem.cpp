#include <doctest.h>

#include <cmath>
#include <vector>

#include "emot/errors.hpp"
#include "emot/problem.hpp"

using namespace emot;

namespace {

QuantizedDistribution points(std::vector<double> x, std::vector<double> w) {
  QuantizedDistribution q;
  q.points.resize(x.size(), 1);
  q.weights.resize(w.size());
  for (std::size_t i = 0; i < x.size(); ++i) q.points(i, 0) = x[i];
  for (std::size_t i = 0; i < w.size(); ++i) q.weights(i) = w[i];
  return q;
}

// Quantile of U + N(0, sigma^2) from the density Phi(t/s) - Phi((t-1)/s),
// integrated by the trapezoid rule on a uniform grid.
double grid_quantile(double level, double sigma) {
  const std::size_t m = 1'000'000;
  const double lo = -0.1, hi = 1.1, h = (hi - lo) / (m - 1);
  auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  auto density = [&](double t) { return phi(t / sigma) - phi((t - 1) / sigma); };
  double cdf = 0.0, prev = density(lo);
  for (std::size_t k = 1; k < m; ++k) {
    const double t = lo + k * h;
    const double cur = density(t);
    const double next = cdf + 0.5 * h * (prev + cur);
    if (next >= level) return t - h + h * (level - cdf) / (next - cdf);
    cdf = next;
    prev = cur;
  }
  return hi;
}

}  // namespace

TEST_CASE("build_mot examples") {
  const MotProblem one = build_mot(points({0}, {1}), points({0}, {1}), l1_cost, 0.0, 1.0);
  CHECK(one.cost(0, 0) == 0);
  CHECK(one.v(0, 0) == 0);
  CHECK(one.w(0, 0) == 0);

  const MotProblem two =
      build_mot(points({0, 1}, {.5, .5}), points({0, 1}, {.5, .5}), l1_cost, 0.0, 1.0);
  CHECK(two.w(0, 0) == 0.0);
  CHECK(two.w(1, 0) == 0.5);
  CHECK(two.v(1, 0) == 1.0);
  CHECK(two.cost(0, 1) == 1.0);

  CHECK_THROWS_AS(build_mot(points({0, 1}, {.5, .5}), points({0}, {1}), l1_cost, 0, 1), Error);
  try {
    build_mot(points({0, 1}, {1.5, -.5}), points({0, 1}, {.5, .5}), l1_cost, 0, 1);
    FAIL("expected InvalidWeight");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidWeight);
  }
}

TEST_CASE("problem validation") {
  MotProblem p = build_option_pricing(4, std::nullopt, 1.0);
  p.r(0) += 1e-6;
  CHECK_THROWS_AS(p.validate(), Error);
  p = build_option_pricing(4, std::nullopt, 1.0);
  p.epsilon = -1;
  CHECK_THROWS_AS(p.validate(), Error);
  p = build_option_pricing(4, std::nullopt, 1.0);
  p.cost(1, 1) = NAN;
  CHECK_THROWS_AS(p.validate(), Error);
  p = build_option_pricing(4, std::nullopt, 1.0);
  p.eta = 0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("option pricing n=2") {
  const MotProblem p = build_option_pricing(2, std::nullopt, 1200);
  CHECK(p.w(0, 0) / p.r(0) == 0.25);
  CHECK(p.w(1, 0) / p.r(1) == 0.75);
  CHECK(p.r(0) == 0.5);
  CHECK(p.c(1) == 0.5);
  CHECK(p.epsilon == 1.0);
  CHECK(std::abs(p.v(0, 0) - grid_quantile(0.25, kOptionPricingSigma)) <= 1e-6);
  CHECK(std::abs(p.v(1, 0) - grid_quantile(0.75, kOptionPricingSigma)) <= 1e-6);
}

TEST_CASE("option pricing n=4 against hand evaluation") {
  const MotProblem p = build_option_pricing(4, std::nullopt, 1.0);
  const double w[] = {0.125, 0.375, 0.625, 0.875};
  for (int i = 0; i < 4; ++i) {
    const double v = grid_quantile(w[i], kOptionPricingSigma);
    CHECK(std::abs(p.v(i, 0) - v) <= 1e-6);
    CHECK(p.w(i, 0) == doctest::Approx(w[i] / 4).epsilon(1e-15));
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(p.cost(i, j) == doctest::Approx(std::abs(w[i] - p.v(j, 0))).epsilon(1e-15));
  CHECK(p.epsilon == 0.5);
}

TEST_CASE("option pricing invariants at n=800") {
  const MotProblem p = build_option_pricing(800, std::nullopt, 1200);
  CHECK(std::abs(p.r.sum() - 1) <= 1e-12);
  CHECK(std::abs(p.c.sum() - 1) <= 1e-12);
  for (std::size_t j = 1; j < p.n; ++j) CHECK(p.v(j, 0) > p.v(j - 1, 0));
  double bary_src = p.w.sum();
  double bary_tgt = 0;
  for (std::size_t j = 0; j < p.n; ++j) bary_tgt += p.c(j) * p.v(j, 0);
  CHECK(std::abs(bary_src - bary_tgt) <= 2e-3);
}

TEST_CASE("smoothed uniform cdf") {
  CHECK(smoothed_uniform_cdf(0.5, 1e-2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(smoothed_uniform_cdf(-1, 1e-2) == doctest::Approx(0.0));
  CHECK(smoothed_uniform_cdf(2, 1e-2) == doctest::Approx(1.0));
  const double q = smoothed_uniform_quantile(0.3, 1e-2);
  CHECK(std::abs(smoothed_uniform_cdf(q, 1e-2) - 0.3) <= 1e-11);
  CHECK_THROWS_AS(smoothed_uniform_quantile(1.0, 1e-2), Error);
}

TEST_CASE("balance instance") {
  const MotProblem p = build_balance(4, 1, 1, 0.1, 1.0, 9);
  CHECK(p.v(0, 0) == 4);
  CHECK(p.v(1, 0) == -4);
  CHECK(p.v(2, 0) == 0);
  CHECK(p.v(3, 0) == 0);
  CHECK(p.w.isZero(0));

  const MotProblem big = build_balance(800, 100, 100, 0.1, 1200, 1);
  for (std::size_t j = 0; j < 800; ++j) {
    const double v = big.v(j, 0);
    CHECK((v == 8 || v == -8 || v == 0));
  }
  CHECK(build_balance(50, 5, 5, 0.1, 1, 42).cost == build_balance(50, 5, 5, 0.1, 1, 42).cost);
  CHECK(build_balance(50, 5, 5, 0.1, 1, 42).cost != build_balance(50, 5, 5, 0.1, 1, 43).cost);
  CHECK(p.cost.minCoeff() >= 0);
  CHECK(p.cost.maxCoeff() < 1);

  // The independent coupling satisfies the balance constraint exactly.
  const MotProblem q = build_balance(40, 5, 5, 0.1, 1, 3);
  const DenseMatrix indep = q.r * q.c.transpose();
  CHECK((indep * q.v - q.w).cwiseAbs().sum() <= 1e-15);
  CHECK_THROWS_AS(build_balance(4, 3, 2, 0.1, 1, 0), Error);
}

TEST_CASE("ranking instance") {
  const SmotProblem p =
      build_ranking_from_scores(Vector::Ones(2), Vector::Constant(2, 0.5), 1, 0.3, 1.0);
  const double alpha = 1.0 / (1.0 / std::log2(2.0) + 1.0 / std::log2(3.0));
  CHECK(p.cost(0, 0) == doctest::Approx(-alpha).epsilon(1e-15));
  CHECK(p.w(0, 0) == doctest::Approx(0.15));
  CHECK(p.w(1, 0) == 0);

  const SmotProblem big = build_ranking(200, kRankingTopPositions, kRankingThreshold, 1200, 7);
  CHECK(kRankingTopPositions == 39);
  CHECK(kRankingThreshold == 0.3);
  CHECK(big.cost.maxCoeff() <= 0);
  for (std::size_t j = 0; j < big.n; ++j)
    for (std::size_t i = 1; i < big.n; ++i) CHECK(big.cost(i, j) >= big.cost(i - 1, j));
  for (std::size_t i = 0; i < big.n; ++i)
    CHECK(big.w(i, 0) == (i < 39 ? 0.3 / 200 : 0.0));
  CHECK_THROWS_AS(build_ranking(5, 6, 0.3, 1, 0), Error);
}
