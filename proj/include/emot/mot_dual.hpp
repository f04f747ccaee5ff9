#pragma once

#include <cstddef>

#include "emot/dual.hpp"
#include "emot/problem.hpp"

namespace emot {

// Dual variables of the entropic MOT problem: x (rows), y (columns), A and B
// (the two one-sided martingale constraints) and u (violation budget).
struct MotDual {
  Vector x;
  Vector y;
  DenseMatrix a;  // n x d
  DenseMatrix b;  // n x d
  double u = 0.0;

  static MotDual zeros(std::size_t n, std::size_t d);
  // Flat layout (x, y, a_.1 .. a_.d, b_.1 .. b_.d, u), columns of A and B
  // stored contiguously.
  Vector pack() const;
  static MotDual unpack(const Vector& z, std::size_t n, std::size_t d);
};

inline std::size_t mot_dual_dim(std::size_t n, std::size_t d) {
  return 2 * n + 2 * n * d + 1;
}

// Primal variables recovered from a dual point.
struct PrimalRecovery {
  DenseMatrix p;  // transport plan
  DenseMatrix s;  // W - PV + E at optimum
  DenseMatrix t;  // PV - W + E at optimum
  DenseMatrix e;  // per-entry violation allowance
  double q = 0.0; // unused violation budget
};

class MotPotential final : public DualPotential {
 public:
  explicit MotPotential(const MotProblem& problem);

  std::size_t n() const override { return prob_.n; }
  std::size_t d() const override { return prob_.d; }
  std::size_t dim() const override { return mot_dual_dim(prob_.n, prob_.d); }
  double eta() const override { return prob_.eta; }
  const Vector& column_weights() const override { return prob_.c; }

  DenseMatrix log_plan(const Vector& z) const override;
  Evaluation evaluate(const Vector& z) const override;
  Vector gradient(const Vector& z) const override;
  SparseSymMatrix hessian(const Vector& z,
                          const HessianOptions& opts) const override;
  SparseSymMatrix block_hessian(const Vector& z) const override;

  const MotProblem& problem() const { return prob_; }
  std::size_t u_index() const { return dim() - 1; }

 private:
  SparseSymMatrix assemble(const Vector& z, const HessianOptions& opts,
                           bool include_y) const;

  MotProblem prob_;
};

// Typed entry points over MotDual.
DenseMatrix log_plan(const MotProblem& prob, const MotDual& z);
// Throws kPotentialOverflow if any exponential had to be capped.
double eval_f(const MotProblem& prob, const MotDual& z);
MotDual grad_f(const MotProblem& prob, const MotDual& z);
SparseSymMatrix hessian_f(const MotProblem& prob, const MotDual& z,
                          const HessianOptions& opts);
PrimalRecovery recover_primal(const MotProblem& prob, const MotDual& z);
// C.P + (1/eta) H(P, S, T, E, q), with 0 log 0 = 0.
double primal_objective(const MotProblem& prob, const PrimalRecovery& rec);

}  // namespace emot
