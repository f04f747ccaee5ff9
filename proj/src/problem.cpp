#include "emot/problem.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "emot/errors.hpp"
#include "emot/random.hpp"

namespace emot {
namespace {

constexpr double kWeightTolerance = 1e-12;

void check_weights(const Vector& weights, const char* name) {
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights(i)) || weights(i) <= 0.0) {
      throw Error(ErrorCode::kInvalidWeight,
                  std::string(name) + "[" + std::to_string(i) +
                      "] must be positive and finite");
    }
  }
  const double total = weights.sum();
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw Error(ErrorCode::kInvalidWeight,
                std::string(name) + " sums to " + std::to_string(total) +
                    ", expected 1");
  }
}

void check_shape(const DenseMatrix& m, std::size_t rows, std::size_t cols,
                 const char* name) {
  if (static_cast<std::size_t>(m.rows()) != rows ||
      static_cast<std::size_t>(m.cols()) != cols) {
    throw Error(ErrorCode::kSizeMismatch,
                std::string(name) + " is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", expected " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(name) + " has non-finite entries");
  }
}

template <typename Problem>
void validate_common(const Problem& p) {
  if (p.n == 0 || p.d == 0) {
    throw Error(ErrorCode::kSizeMismatch, "n and d must be positive");
  }
  check_shape(p.cost, p.n, p.n, "cost");
  check_shape(p.v, p.n, p.d, "V");
  check_shape(p.w, p.n, p.d, "W");
  if (static_cast<std::size_t>(p.r.size()) != p.n ||
      static_cast<std::size_t>(p.c.size()) != p.n) {
    throw Error(ErrorCode::kSizeMismatch, "marginals must have length n");
  }
  check_weights(p.r, "r");
  check_weights(p.c, "c");
  if (!(p.eta > 0.0) || !std::isfinite(p.eta)) {
    throw Error(ErrorCode::kInvalidArgument, "eta must be positive");
  }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Antiderivative of the standard normal CDF.
double normal_cdf_integral(double x) { return x * normal_cdf(x) + normal_pdf(x); }

}  // namespace

void MotProblem::validate() const {
  validate_common(*this);
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
  }
}

MotProblem MotProblem::with_eta(double new_eta) const {
  MotProblem out = *this;
  out.eta = new_eta;
  return out;
}

void SmotProblem::validate() const { validate_common(*this); }

SmotProblem SmotProblem::with_eta(double new_eta) const {
  SmotProblem out = *this;
  out.eta = new_eta;
  return out;
}

void QuantizedDistribution::validate() const {
  if (static_cast<std::size_t>(weights.size()) != size()) {
    throw Error(ErrorCode::kSizeMismatch, "one weight per point required");
  }
  check_weights(weights, "weights");
  if (!points.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite support point");
  }
}

double l1_cost(const Eigen::Ref<const Eigen::RowVectorXd>& a,
               const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  return (a - b).cwiseAbs().sum();
}

MotProblem build_mot(const QuantizedDistribution& source,
                     const QuantizedDistribution& target,
                     const CostFunction& cost_fn, double epsilon, double eta) {
  if (source.size() != target.size()) {
    throw Error(ErrorCode::kSizeMismatch,
                "source has " + std::to_string(source.size()) +
                    " sites, target has " + std::to_string(target.size()));
  }
  if (source.points.cols() != target.points.cols()) {
    throw Error(ErrorCode::kSizeMismatch, "source and target dimensions differ");
  }
  source.validate();
  target.validate();

  MotProblem p;
  p.n = source.size();
  p.d = static_cast<std::size_t>(source.points.cols());
  p.r = source.weights;
  p.c = target.weights;
  p.v = target.points;
  p.w = source.points;
  for (std::size_t i = 0; i < p.n; ++i) p.w.row(i) *= p.r(i);
  p.cost.resize(p.n, p.n);
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = 0; j < p.n; ++j) {
      p.cost(i, j) = cost_fn(source.points.row(i), target.points.row(j));
    }
  }
  p.epsilon = epsilon;
  p.eta = eta;
  p.validate();
  return p;
}

double smoothed_uniform_cdf(double t, double sigma) {
  // int_0^1 Phi((t - x) / sigma) dx = sigma * [G(t/sigma) - G((t-1)/sigma)]
  return sigma * (normal_cdf_integral(t / sigma) -
                  normal_cdf_integral((t - 1.0) / sigma));
}

double smoothed_uniform_quantile(double p, double sigma) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "quantile level must be in (0,1)");
  }
  double lo = -10.0 * sigma;
  double hi = 1.0 + 10.0 * sigma;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (smoothed_uniform_cdf(mid, sigma) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

MotProblem build_option_pricing(std::size_t n, std::optional<double> epsilon,
                                double eta) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "option pricing needs n >= 2");
  const double dn = static_cast<double>(n);
  QuantizedDistribution source;
  QuantizedDistribution target;
  source.points.resize(n, 1);
  target.points.resize(n, 1);
  source.weights = Vector::Constant(n, 1.0 / dn);
  target.weights = Vector::Constant(n, 1.0 / dn);
  for (std::size_t i = 0; i < n; ++i) {
    const double level = (static_cast<double>(i) + 0.5) / dn;
    source.points(i, 0) = level;
    target.points(i, 0) = smoothed_uniform_quantile(level, kOptionPricingSigma);
  }
  return build_mot(source, target, l1_cost, epsilon.value_or(2.0 / dn), eta);
}

MotProblem build_balance(std::size_t n, std::size_t size_a, std::size_t size_b,
                         double epsilon, double eta, std::uint64_t seed) {
  if (size_a == 0 || size_b == 0 || size_a + size_b > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "balance groups must be nonempty and fit in n");
  }
  const double dn = static_cast<double>(n);
  MotProblem p;
  p.n = n;
  p.d = 1;
  p.r = Vector::Constant(n, 1.0 / dn);
  p.c = Vector::Constant(n, 1.0 / dn);
  p.v = DenseMatrix::Zero(n, 1);
  for (std::size_t j = 0; j < size_a; ++j) p.v(j, 0) = dn / static_cast<double>(size_a);
  for (std::size_t j = size_a; j < size_a + size_b; ++j) {
    p.v(j, 0) = -dn / static_cast<double>(size_b);
  }
  p.w = DenseMatrix::Zero(n, 1);
  Rng rng(seed);
  p.cost.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) p.cost(i, j) = rng.uniform();
  }
  p.epsilon = epsilon;
  p.eta = eta;
  p.validate();
  return p;
}

SmotProblem build_ranking_from_scores(const Vector& scores,
                                      const Vector& utilities,
                                      std::size_t k_top, double w_top,
                                      double eta) {
  const std::size_t n = static_cast<std::size_t>(scores.size());
  if (static_cast<std::size_t>(utilities.size()) != n) {
    throw Error(ErrorCode::kSizeMismatch, "one utility per score required");
  }
  if (n == 0 || k_top > n) {
    throw Error(ErrorCode::kInvalidArgument, "k_top must not exceed n");
  }
  const double dn = static_cast<double>(n);

  std::vector<double> sorted(scores.data(), scores.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double ideal_dcg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ideal_dcg += sorted[i] / std::log2(static_cast<double>(i) + 2.0);
  }
  if (!(ideal_dcg > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "scores must not all be zero");
  }
  const double alpha = 1.0 / ideal_dcg;

  SmotProblem p;
  p.n = n;
  p.d = 1;
  p.r = Vector::Constant(n, 1.0 / dn);
  p.c = Vector::Constant(n, 1.0 / dn);
  p.v = utilities;
  p.w = DenseMatrix::Zero(n, 1);
  for (std::size_t i = 0; i < k_top; ++i) p.w(i, 0) = p.r(i) * w_top;
  p.cost.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double discount = std::log2(static_cast<double>(i) + 2.0);
    for (std::size_t j = 0; j < n; ++j) {
      p.cost(i, j) = alpha * (-scores(j)) / discount;
    }
  }
  p.eta = eta;
  p.validate();
  return p;
}

SmotProblem build_ranking(std::size_t n, std::size_t k_top, double w_top,
                          double eta, std::uint64_t seed) {
  Rng rng(seed);
  Vector scores(n);
  Vector utilities(n);
  for (std::size_t j = 0; j < n; ++j) scores(j) = rng.uniform();
  for (std::size_t j = 0; j < n; ++j) utilities(j) = rng.uniform();
  return build_ranking_from_scores(scores, utilities, k_top, w_top, eta);
}

}  // namespace emot
