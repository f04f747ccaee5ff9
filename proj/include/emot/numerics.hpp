#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace emot {

using Vector = Eigen::VectorXd;
using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Exponent cap for overflow-safe evaluation. exp(700) ~ 1e304.
inline constexpr double kMaxExponent = 700.0;

// exp(min(arg, kMaxExponent)); sets *clamped when the cap was hit.
double capped_exp(double arg, bool* clamped);

// Neumaier-compensated running sum. Used wherever a dual objective is
// accumulated so that line-search comparisons are not dominated by
// summation-order noise.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// r_i = log sum_j exp(logM_ij) with per-row max subtraction.
// Throws kEmptyRow if a row has no entry above -inf.
Vector log_sum_exp_rows(const DenseMatrix& log_m);
// Column-wise counterpart (same contract, per column).
Vector log_sum_exp_cols(const DenseMatrix& log_m);

struct TopK {
  double threshold = 0.0;     // smallest kept value
  std::vector<bool> mask;     // row-major, rows*cols
  std::vector<std::size_t> kept;  // row-major indices, ascending
};

// Keeps exactly k entries of a nonnegative matrix: larger values first,
// ties broken by smaller row-major index. Throws kInvalidK.
TopK top_k_threshold(const DenseMatrix& m, std::size_t k);

// Symmetric sparse matrix stored as its upper triangle (row <= col).
class SparseSymMatrix {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseSymMatrix() = default;
  explicit SparseSymMatrix(std::size_t dim);

  // Each unordered pair may appear at most once; (i, j) and (j, i) name the
  // same entry. Throws kInvalidArgument on range, duplicate or non-finite.
  static SparseSymMatrix from_entries(std::size_t dim,
                                      const std::vector<Entry>& entries);
  // Same, but repeated pairs are summed (assembly from block contributions).
  static SparseSymMatrix from_summed_entries(std::size_t dim,
                                             const std::vector<Entry>& entries);

  std::size_t dim() const { return dim_; }
  // Stored (upper-triangle) nonzeros.
  std::size_t stored_nonzeros() const;
  // Nonzeros of the full symmetric matrix (off-diagonals counted twice).
  std::size_t full_nonzeros() const;

  double coeff(std::size_t i, std::size_t j) const;
  Vector multiply(const Vector& x) const;
  Eigen::MatrixXd to_dense() const;
  std::vector<Entry> entries() const;

  // Drops row and column k; indices above k shift down by one.
  SparseSymMatrix without_index(std::size_t k) const;

  const Eigen::SparseMatrix<double>& upper() const { return upper_; }

 private:
  std::size_t dim_ = 0;
  Eigen::SparseMatrix<double> upper_;  // column-major, upper triangle
};

struct SymSolve {
  Vector x;
  double residual = 0.0;  // ||(H - reg I)x - b||_inf / max(1, ||b||_inf)
  double reg = 0.0;
};

inline constexpr double kSolveTolerance = 1e-10;

// Solves (H - reg*I) x = b with a sparse LDL^T factorization and a few steps
// of iterative refinement. Returns a best-effort solution when the residual
// stays above kSolveTolerance. Throws kSingularSystem on a zero pivot.
SymSolve solve_sym(const SparseSymMatrix& h, const Vector& b, double reg);

// Tries reg in {0, 1e-12, 1e-9, 1e-6} and returns the first solve whose
// residual meets kSolveTolerance, else the best one seen. Throws
// kSingularSystem if every rung is singular.
SymSolve solve_sym_escalating(const SparseSymMatrix& h, const Vector& b);

}  // namespace emot
