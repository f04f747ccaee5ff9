#include "plan_terms.hpp"

#include <cmath>

namespace emot::detail {

DenseMatrix plan_log(const DenseMatrix& cost, const DenseMatrix& coupling,
                     const DenseMatrix& v, const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Vector>& y, double eta) {
  DenseMatrix theta = coupling * v.transpose() - cost;
  theta.colwise() += x;
  theta.rowwise() += y.transpose();
  theta *= eta;
  theta.array() -= 1.0;
  return theta;
}

PlanTerms plan_terms(const DenseMatrix& log_p, const DenseMatrix& v) {
  PlanTerms t;
  const Eigen::Index n = log_p.rows();
  t.p.resize(n, log_p.cols());
  CompensatedSum total;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < log_p.cols(); ++j) {
      const double e = capped_exp(log_p(i, j), &t.clamped);
      t.p(i, j) = e;
      total.add(e);
    }
  }
  t.total = total.value();
  t.row_sums = t.p.rowwise().sum();
  t.col_sums = t.p.colwise().sum().transpose();
  t.pv = t.p * v;
  return t;
}

SparseSymMatrix EntryList::build(std::size_t dim) const {
  return SparseSymMatrix::from_summed_entries(dim, entries_);
}

void add_plan_hessian(EntryList& out, const PlanTerms& plan,
                      const std::vector<std::size_t>* cross_kept,
                      const DenseMatrix& v, std::size_t groups, double eta,
                      bool include_y) {
  const std::size_t n = static_cast<std::size_t>(plan.p.rows());
  const std::size_t d = static_cast<std::size_t>(v.cols());
  auto group_index = [n, d](std::size_t g, std::size_t k, std::size_t i) {
    return 2 * n + (g * d + k) * n + i;
  };

  for (std::size_t i = 0; i < n; ++i) {
    out.add(i, i, -eta * plan.row_sums(i));
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t k = 0; k < d; ++k) {
        out.add(i, group_index(g, k, i), -eta * plan.pv(i, k));
      }
    }
  }

  // Constraint-dual blocks: diagonal in i, dense over (group, k).
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t k2 = k; k2 < d; ++k2) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += plan.p(i, j) * v(j, k) * v(j, k2);
        const double h = -eta * s;
        for (std::size_t g = 0; g < groups; ++g) {
          for (std::size_t g2 = 0; g2 < groups; ++g2) {
            // Visit each unordered pair of (g,k) labels once.
            if (k == k2 && g2 < g) continue;
            out.add(group_index(g, k, i), group_index(g2, k2, i), h);
          }
        }
      }
    }
  }

  if (!include_y) return;

  for (std::size_t j = 0; j < n; ++j) out.add(n + j, n + j, -eta * plan.col_sums(j));

  auto add_cross = [&](std::size_t i, std::size_t j) {
    const double pij = plan.p(i, j);
    if (pij == 0.0) return;
    out.add(i, n + j, -eta * pij);
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t k = 0; k < d; ++k) {
        out.add(n + j, group_index(g, k, i), -eta * pij * v(j, k));
      }
    }
  };
  if (cross_kept != nullptr) {
    for (std::size_t idx : *cross_kept) add_cross(idx / n, idx % n);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) add_cross(i, j);
    }
  }
}

}  // namespace emot::detail
