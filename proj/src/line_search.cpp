#include "emot/line_search.hpp"

#include <cmath>
#include <optional>

#include "emot/errors.hpp"

namespace emot {

void LineSearchParams::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "line search beta must lie in (0, 1)");
  }
  if (!(c1 > 0.0 && c1 < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "line search c1 must lie in (0, 1)");
  }
}

namespace {

std::optional<AscentStep> backtrack(const DualPotential& f, const Vector& z,
                                    double fz, const Vector& grad,
                                    const Vector& dir,
                                    const LineSearchParams& params) {
  const double slope = grad.dot(dir);
  if (!(slope > 0.0) || !dir.allFinite()) return std::nullopt;
  const double noise = 1e-14 * (1.0 + std::abs(fz));
  double alpha = 1.0;
  for (std::size_t k = 0; k <= params.max_backtracks; ++k, alpha *= params.beta) {
    Vector cand = z + alpha * dir;
    const Evaluation e = f.evaluate(cand);
    if (!e.clamped && std::isfinite(e.value) &&
        e.value >= fz + params.c1 * alpha * slope - noise) {
      return AscentStep{std::move(cand), e.value, alpha, false};
    }
  }
  return std::nullopt;
}

}  // namespace

AscentStep armijo_ascent(const DualPotential& f, const Vector& z, double fz,
                         const Vector& grad, const Vector& direction,
                         const Vector& fallback, const LineSearchParams& params) {
  if (auto step = backtrack(f, z, fz, grad, direction, params)) return *step;
  if (auto step = backtrack(f, z, fz, grad, fallback, params)) {
    step->used_fallback = true;
    return *step;
  }
  throw Error(ErrorCode::kLineSearchFailed,
              "no acceptable step along Newton or gradient direction");
}

}  // namespace emot
