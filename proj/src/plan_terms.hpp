#pragma once

// Internal helpers shared by the MOT and SMOT potentials: the plan term
// -(1/eta) sum_ij exp(eta*theta_ij - 1) and the Hessian entries it induces.

#include <cstddef>
#include <vector>

#include "emot/numerics.hpp"

namespace emot::detail {

// log P = eta * (-C + coupling V^T + x 1^T + 1 y^T) - 1
DenseMatrix plan_log(const DenseMatrix& cost, const DenseMatrix& coupling,
                     const DenseMatrix& v, const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Vector>& y, double eta);

struct PlanTerms {
  DenseMatrix p;     // exp(log P), capped
  Vector row_sums;   // P 1
  Vector col_sums;   // P^T 1
  DenseMatrix pv;    // P V, n x d
  double total = 0;  // compensated sum of all entries
  bool clamped = false;
};

PlanTerms plan_terms(const DenseMatrix& log_p, const DenseMatrix& v);

// Map from a full-ordering index to the matrix being assembled; returns
// npos for dropped variables.
struct IndexMap {
  std::size_t n = 0;
  bool drop_y = false;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t operator()(std::size_t full) const {
    if (!drop_y) return full;
    if (full < n) return full;
    if (full < 2 * n) return npos;
    return full - n;
  }
};

class EntryList {
 public:
  explicit EntryList(IndexMap map) : map_(map) {}
  void add(std::size_t i, std::size_t j, double value) {
    if (value == 0.0) return;
    const std::size_t a = map_(i);
    const std::size_t b = map_(j);
    if (a == IndexMap::npos || b == IndexMap::npos) return;
    entries_.push_back({a, b, value});
  }
  // Sums duplicates into a symmetric matrix.
  SparseSymMatrix build(std::size_t dim) const;

 private:
  IndexMap map_;
  std::vector<SparseSymMatrix::Entry> entries_;
};

// Adds the Hessian of the plan term. `groups` constraint-dual blocks of size
// n*d each start at index 2n and all couple to the plan through V. The
// (x,y) and (y,group) cross blocks use only the row-major plan entries listed
// in `cross_kept` when it is non-null (the sparsified plan), the full plan
// otherwise. Every other block always uses the full plan.
void add_plan_hessian(EntryList& out, const PlanTerms& plan,
                      const std::vector<std::size_t>* cross_kept,
                      const DenseMatrix& v, std::size_t groups, double eta,
                      bool include_y);

}  // namespace emot::detail
