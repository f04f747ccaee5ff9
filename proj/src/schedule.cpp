#include "emot/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emot/errors.hpp"

namespace emot {

void EtaSchedule::validate() const {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) {
    throw Error(ErrorCode::kInvalidArgument, "eta0 must be positive");
  }
  if (!(eta_target > 0.0) || !std::isfinite(eta_target)) {
    throw Error(ErrorCode::kInvalidArgument, "target eta must be positive");
  }
  if (iters_per_level < 1) {
    throw Error(ErrorCode::kInvalidArgument, "iters_per_level must be >= 1");
  }
}

std::size_t EtaSchedule::level_count() const {
  validate();
  if (eta_target <= eta0) return 0;
  return static_cast<std::size_t>(std::ceil(std::log2(eta_target / eta0)));
}

std::vector<double> EtaSchedule::levels() const {
  std::vector<double> out;
  const std::size_t count = level_count();
  double eta = eta0;
  for (std::size_t l = 0; l < count; ++l, eta *= 2.0) out.push_back(eta);
  return out;
}

namespace {

template <typename Problem, typename Potential>
Vector run_levels(const Problem& prob, const EtaSchedule& schedule,
                  std::size_t inner_newton, Vector z, double* max_column_error) {
  SinkhornConfig cfg;
  cfg.max_outer = schedule.iters_per_level;
  cfg.inner_newton = inner_newton;
  cfg.grad_tol = 0.0;
  const auto levels = schedule.levels();
  for (std::size_t l = 0; l < levels.size(); ++l) {
    try {
      const Potential f(prob.with_eta(levels[l]));
      SolveResult r = run_sinkhorn(f, z, cfg);
      if (max_column_error != nullptr) {
        *max_column_error = std::max(*max_column_error, r.stats.max_column_error);
      }
      z = std::move(r.z);
    } catch (const Error& e) {
      throw Error(e.code(), "warm start level " + std::to_string(l) +
                                " (eta=" + std::to_string(levels[l]) + "): " +
                                e.what());
    }
  }
  return z;
}

}  // namespace

MotDual warm_init(const MotProblem& prob, const EtaSchedule& schedule,
                  std::size_t inner_newton, double* max_column_error) {
  const Vector z = run_levels<MotProblem, MotPotential>(
      prob, schedule, inner_newton, MotDual::zeros(prob.n, prob.d).pack(),
      max_column_error);
  return MotDual::unpack(z, prob.n, prob.d);
}

SmotDual warm_init(const SmotProblem& prob, const EtaSchedule& schedule,
                   std::size_t inner_newton, double* max_column_error) {
  const Vector z = run_levels<SmotProblem, SmotPotential>(
      prob, schedule, inner_newton, SmotDual::zeros(prob.n, prob.d).pack(),
      max_column_error);
  return SmotDual::unpack(z, prob.n, prob.d);
}

}  // namespace emot
