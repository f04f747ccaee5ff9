#pragma once

#include <cstddef>

#include "emot/dual.hpp"
#include "emot/problem.hpp"

namespace emot {

// Dual variables of the entropic super-martingale problem.
struct SmotDual {
  Vector x;
  Vector y;
  DenseMatrix a;  // n x d, one multiplier per inequality (PV)_ik >= W_ik

  static SmotDual zeros(std::size_t n, std::size_t d);
  // Flat layout (x, y, a_.1 .. a_.d).
  Vector pack() const;
  static SmotDual unpack(const Vector& z, std::size_t n, std::size_t d);
};

inline std::size_t smot_dual_dim(std::size_t n, std::size_t d) {
  return 2 * n + n * d;
}

struct SmotRecovery {
  DenseMatrix p;
  DenseMatrix s;  // equals PV - W at the optimum
};

class SmotPotential final : public DualPotential {
 public:
  explicit SmotPotential(const SmotProblem& problem);

  std::size_t n() const override { return prob_.n; }
  std::size_t d() const override { return prob_.d; }
  std::size_t dim() const override { return smot_dual_dim(prob_.n, prob_.d); }
  double eta() const override { return prob_.eta; }
  const Vector& column_weights() const override { return prob_.c; }

  DenseMatrix log_plan(const Vector& z) const override;
  Evaluation evaluate(const Vector& z) const override;
  Vector gradient(const Vector& z) const override;
  SparseSymMatrix hessian(const Vector& z,
                          const HessianOptions& opts) const override;
  SparseSymMatrix block_hessian(const Vector& z) const override;

  const SmotProblem& problem() const { return prob_; }

 private:
  SparseSymMatrix assemble(const Vector& z, const HessianOptions& opts,
                           bool include_y) const;

  SmotProblem prob_;
};

DenseMatrix log_plan(const SmotProblem& prob, const SmotDual& z);
double eval_g(const SmotProblem& prob, const SmotDual& z);
SmotDual grad_g(const SmotProblem& prob, const SmotDual& z);
SparseSymMatrix hessian_g(const SmotProblem& prob, const SmotDual& z,
                          const HessianOptions& opts);
SmotRecovery recover_primal_smot(const SmotProblem& prob, const SmotDual& z);

}  // namespace emot
