#include "emot/apdagd.hpp"

#include <cmath>
#include <string>

#include "emot/errors.hpp"

namespace emot {

void ApdagdConfig::validate() const {
  if (max_iter < 1) throw Error(ErrorCode::kInvalidArgument, "max_iter must be >= 1");
  if (!(l0 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "L0 must be positive");
  if (max_doublings < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_doublings must be >= 1");
  }
}

ApdagdResult run_apdagd(const DualPotential& f, const Vector& z0,
                        const ApdagdConfig& cfg, ConvergenceTrace* trace) {
  cfg.validate();
  if (static_cast<std::size_t>(z0.size()) != f.dim()) {
    throw Error(ErrorCode::kSizeMismatch, "initial dual has wrong length");
  }
  ApdagdResult res;
  Vector z = z0;
  Vector zeta = z0;
  double beta = 0.0;
  double l = cfg.l0;

  for (std::size_t k = 0; k < cfg.max_iter; ++k) {
    double m = l / 2.0;
    bool accepted = false;
    Vector lambda, zeta_next, z_next;
    double alpha = 0.0, beta_next = 0.0, f_next = 0.0;
    for (std::size_t t = 0; t < cfg.max_doublings; ++t) {
      m *= 2.0;
      alpha = (1.0 + std::sqrt(1.0 + 4.0 * m * beta)) / (2.0 * m);
      beta_next = beta + alpha;
      const double tau = alpha / beta_next;
      lambda = tau * zeta + (1.0 - tau) * z;
      const Evaluation f_lambda = f.evaluate(lambda);
      if (f_lambda.clamped || !std::isfinite(f_lambda.value)) continue;
      const Vector g = f.gradient(lambda);
      zeta_next = zeta + alpha * g;
      z_next = tau * zeta_next + (1.0 - tau) * z;
      const Evaluation fz = f.evaluate(z_next);
      if (fz.clamped || !std::isfinite(fz.value)) continue;
      const Vector step = z_next - lambda;
      if (fz.value >= f_lambda.value + g.dot(step) - 0.5 * m * step.squaredNorm()) {
        accepted = true;
        f_next = fz.value;
        break;
      }
    }
    if (!accepted) {
      throw Error(ErrorCode::kAdaptiveStall,
                  "acceptance test failed after " +
                      std::to_string(cfg.max_doublings) + " doublings at step " +
                      std::to_string(k + 1));
    }
    ApdagdStep rec{m, alpha, beta_next, {}, {}};
    if (cfg.keep_iterates) {
      rec.lambda = lambda;
      rec.z = z_next;
    }
    res.history.push_back(std::move(rec));
    z = std::move(z_next);
    zeta = std::move(zeta_next);
    beta = beta_next;
    l = m / 2.0;
    ++res.iterations;

    res.objective = f_next;
    res.grad_inf = f.gradient(z).lpNorm<Eigen::Infinity>();
    if (trace != nullptr) trace->record(f, z, "apdagd", res.objective, res.grad_inf);
    if (cfg.grad_tol > 0.0 && res.grad_inf <= cfg.grad_tol) {
      res.converged = true;
      break;
    }
  }
  res.z = std::move(z);
  return res;
}

}  // namespace emot
