#pragma once

#include <cstddef>
#include <vector>

#include "emot/mot_dual.hpp"
#include "emot/sinkhorn.hpp"
#include "emot/smot_dual.hpp"

namespace emot {

// Geometric eta levels eta0 * 2^l, l = 0 .. N-1 with N = ceil(log2(target/eta0))
// (zero levels when target <= eta0). Every level lies strictly below target.
struct EtaSchedule {
  double eta0 = 12.5;
  double eta_target = 12.5;
  std::size_t iters_per_level = 5;

  void validate() const;
  std::size_t level_count() const;
  std::vector<double> levels() const;
};

// Runs iters_per_level Sinkhorn-type iterations at each level starting from
// zero duals, carrying the duals across levels unchanged. The largest
// post-scaling column error is folded into *max_column_error when given.
MotDual warm_init(const MotProblem& prob, const EtaSchedule& schedule,
                  std::size_t inner_newton = 3,
                  double* max_column_error = nullptr);
SmotDual warm_init(const SmotProblem& prob, const EtaSchedule& schedule,
                   std::size_t inner_newton = 3,
                   double* max_column_error = nullptr);

}  // namespace emot
