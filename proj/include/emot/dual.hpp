#pragma once

#include <cstddef>
#include <string>

#include "emot/numerics.hpp"

namespace emot {

enum class HessianMode { kExact, kSparsified };

struct HessianOptions {
  HessianMode mode = HessianMode::kExact;
  double rho = 1.0;  // retention fraction, used in kSparsified mode

  static HessianOptions exact() { return {}; }
  static HessianOptions sparsified(double rho) {
    return {HessianMode::kSparsified, rho};
  }
};

// Result of an overflow-guarded potential evaluation. `clamped` marks a value
// computed with at least one capped exponential; such values must not be
// trusted for step acceptance.
struct Evaluation {
  double value = 0.0;
  bool clamped = false;
  std::string offending;  // term class that hit the cap, if any
};

// Number of plan entries kept by Sparsify: ceil(rho * n^2), at least 1.
std::size_t sparsified_count(std::size_t n, double rho);

// Concave dual potential over a flat variable vector laid out as
// (x[0..n), y[0..n), constraint duals..., extra scalars).
//
// Both the martingale potential f and the super-martingale potential g
// implement this, so every solver works on either.
class DualPotential {
 public:
  virtual ~DualPotential() = default;

  virtual std::size_t n() const = 0;
  virtual std::size_t d() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double eta() const = 0;
  virtual const Vector& column_weights() const = 0;

  // eta * (-C + x 1^T + 1 y^T + coupling) - 1
  virtual DenseMatrix log_plan(const Vector& z) const = 0;
  virtual Evaluation evaluate(const Vector& z) const = 0;
  virtual Vector gradient(const Vector& z) const = 0;
  // Full Hessian in the shared variable ordering.
  virtual SparseSymMatrix hessian(const Vector& z,
                                  const HessianOptions& opts) const = 0;
  // Exact Hessian restricted to every variable except y (indices >= 2n shift
  // down by n). Diagonal in the site index apart from scalar couplings.
  virtual SparseSymMatrix block_hessian(const Vector& z) const = 0;

  std::size_t y_offset() const { return n(); }
};

// Throws kPotentialOverflow when the evaluation was clamped.
double checked_value(const Evaluation& e);

}  // namespace emot
