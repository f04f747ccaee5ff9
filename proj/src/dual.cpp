#include "emot/dual.hpp"

#include <algorithm>
#include <cmath>

#include "emot/errors.hpp"

namespace emot {

std::size_t sparsified_count(std::size_t n, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rho must lie in (0, 1]");
  }
  const std::size_t total = n * n;
  const auto k = static_cast<std::size_t>(std::ceil(rho * static_cast<double>(total)));
  return std::clamp<std::size_t>(k, 1, total);
}

double checked_value(const Evaluation& e) {
  if (e.clamped) {
    throw Error(ErrorCode::kPotentialOverflow,
                "exponent cap reached in " + e.offending + " term");
  }
  return e.value;
}

}  // namespace emot
