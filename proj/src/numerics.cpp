#include "emot/numerics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/SparseCholesky>

#include "emot/errors.hpp"

namespace emot {

double capped_exp(double arg, bool* clamped) {
  if (arg > kMaxExponent) {
    if (clamped != nullptr) *clamped = true;
    return std::exp(kMaxExponent);
  }
  return std::exp(arg);
}

namespace {

template <typename Lane>
double log_sum_exp_lane(const Lane& lane, Eigen::Index which, const char* kind) {
  const double m = lane.maxCoeff();
  if (m == -std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::kEmptyRow,
                std::string(kind) + " " + std::to_string(which) +
                    " has no finite entry");
  }
  double s = 0.0;
  for (Eigen::Index j = 0; j < lane.size(); ++j) s += std::exp(lane(j) - m);
  return m + std::log(s);
}

}  // namespace

Vector log_sum_exp_rows(const DenseMatrix& log_m) {
  Vector out(log_m.rows());
  for (Eigen::Index i = 0; i < log_m.rows(); ++i) {
    out(i) = log_sum_exp_lane(log_m.row(i), i, "row");
  }
  return out;
}

Vector log_sum_exp_cols(const DenseMatrix& log_m) {
  // Two passes over contiguous rows instead of strided column access.
  const Eigen::Index rows = log_m.rows();
  const Eigen::Index cols = log_m.cols();
  Vector mx = Vector::Constant(cols, -std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < rows; ++i) {
    mx = mx.cwiseMax(log_m.row(i).transpose());
  }
  Vector acc = Vector::Zero(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (mx(j) == -std::numeric_limits<double>::infinity()) {
      throw Error(ErrorCode::kEmptyRow,
                  "column " + std::to_string(j) + " has no finite entry");
    }
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      acc(j) += std::exp(log_m(i, j) - mx(j));
    }
  }
  return mx + acc.array().log().matrix();
}

TopK top_k_threshold(const DenseMatrix& m, std::size_t k) {
  const std::size_t total = static_cast<std::size_t>(m.size());
  if (k < 1 || k > total) {
    throw Error(ErrorCode::kInvalidK, "k=" + std::to_string(k) +
                                          " outside [1, " +
                                          std::to_string(total) + "]");
  }
  const double* data = m.data();  // row-major storage
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto before = [data](std::size_t a, std::size_t b) {
    if (data[a] != data[b]) return data[a] > data[b];
    return a < b;
  };
  std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                   before);
  TopK out;
  out.threshold = data[order[k - 1]];
  out.kept.assign(order.begin(), order.begin() + k);
  std::sort(out.kept.begin(), out.kept.end());
  out.mask.assign(total, false);
  for (std::size_t idx : out.kept) out.mask[idx] = true;
  return out;
}

SparseSymMatrix::SparseSymMatrix(std::size_t dim) : dim_(dim) {
  upper_.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

namespace {

std::vector<Eigen::Triplet<double>> upper_triplets(
    std::size_t dim, const std::vector<SparseSymMatrix::Entry>& entries) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(entries.size());
  for (const SparseSymMatrix::Entry& e : entries) {
    if (e.row >= dim || e.col >= dim) {
      throw Error(ErrorCode::kInvalidArgument,
                  "entry (" + std::to_string(e.row) + "," +
                      std::to_string(e.col) + ") out of range for dimension " +
                      std::to_string(dim));
    }
    if (!std::isfinite(e.value)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite matrix entry");
    }
    const auto r = static_cast<Eigen::Index>(std::min(e.row, e.col));
    const auto c = static_cast<Eigen::Index>(std::max(e.row, e.col));
    trips.emplace_back(r, c, e.value);
  }
  return trips;
}

}  // namespace

SparseSymMatrix SparseSymMatrix::from_entries(
    std::size_t dim, const std::vector<Entry>& entries) {
  const auto trips = upper_triplets(dim, entries);
  SparseSymMatrix out(dim);
  std::size_t duplicates = 0;
  out.upper_.setFromTriplets(trips.begin(), trips.end(),
                             [&duplicates](double a, double b) {
                               ++duplicates;
                               return a + b;
                             });
  if (duplicates != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                std::to_string(duplicates) + " duplicate entries");
  }
  out.upper_.makeCompressed();
  return out;
}

SparseSymMatrix SparseSymMatrix::from_summed_entries(
    std::size_t dim, const std::vector<Entry>& entries) {
  const auto trips = upper_triplets(dim, entries);
  SparseSymMatrix out(dim);
  out.upper_.setFromTriplets(trips.begin(), trips.end());
  out.upper_.makeCompressed();
  return out;
}

std::size_t SparseSymMatrix::stored_nonzeros() const {
  return static_cast<std::size_t>(upper_.nonZeros());
}

std::size_t SparseSymMatrix::full_nonzeros() const {
  std::size_t diag = 0;
  for (Eigen::Index c = 0; c < upper_.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(upper_, c); it; ++it) {
      if (it.row() == it.col()) ++diag;
    }
  }
  return 2 * stored_nonzeros() - diag;
}

double SparseSymMatrix::coeff(std::size_t i, std::size_t j) const {
  const auto r = static_cast<Eigen::Index>(std::min(i, j));
  const auto c = static_cast<Eigen::Index>(std::max(i, j));
  return upper_.coeff(r, c);
}

Vector SparseSymMatrix::multiply(const Vector& x) const {
  Vector y = Vector::Zero(static_cast<Eigen::Index>(dim_));
  for (Eigen::Index c = 0; c < upper_.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(upper_, c); it; ++it) {
      y(it.row()) += it.value() * x(c);
      if (it.row() != c) y(c) += it.value() * x(it.row());
    }
  }
  return y;
}

Eigen::MatrixXd SparseSymMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_),
                                            static_cast<Eigen::Index>(dim_));
  for (Eigen::Index c = 0; c < upper_.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(upper_, c); it; ++it) {
      d(it.row(), c) = it.value();
      d(c, it.row()) = it.value();
    }
  }
  return d;
}

std::vector<SparseSymMatrix::Entry> SparseSymMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(stored_nonzeros());
  for (Eigen::Index c = 0; c < upper_.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(upper_, c); it; ++it) {
      out.push_back({static_cast<std::size_t>(it.row()),
                     static_cast<std::size_t>(c), it.value()});
    }
  }
  return out;
}

SparseSymMatrix SparseSymMatrix::without_index(std::size_t k) const {
  std::vector<Entry> kept;
  kept.reserve(stored_nonzeros());
  for (const Entry& e : entries()) {
    if (e.row == k || e.col == k) continue;
    kept.push_back({e.row > k ? e.row - 1 : e.row,
                    e.col > k ? e.col - 1 : e.col, e.value});
  }
  return from_entries(dim_ - 1, kept);
}

namespace {

double relative_residual(const SparseSymMatrix& h, double reg, const Vector& x,
                         const Vector& b) {
  const Vector r = h.multiply(x) - reg * x - b;
  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  return r.lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace

SymSolve solve_sym(const SparseSymMatrix& h, const Vector& b, double reg) {
  if (static_cast<std::size_t>(b.size()) != h.dim()) {
    throw Error(ErrorCode::kSizeMismatch, "rhs length does not match matrix");
  }
  // Factor the (positive semidefinite at a concave optimum) matrix reg*I - H.
  Eigen::SparseMatrix<double> m = -h.upper();
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.coeffRef(i, i) += reg;
  m.makeCompressed();

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> ldlt;
  ldlt.compute(m);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularSystem,
                "zero pivot in LDL^T at reg=" + std::to_string(reg));
  }
  const Vector d = ldlt.vectorD();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) == 0.0 || !std::isfinite(d(i))) {
      throw Error(ErrorCode::kSingularSystem,
                  "degenerate pivot in LDL^T at reg=" + std::to_string(reg));
    }
  }

  SymSolve out;
  out.reg = reg;
  out.x = ldlt.solve(-b);
  if (!out.x.allFinite()) {
    throw Error(ErrorCode::kSingularSystem, "non-finite solution");
  }
  out.residual = relative_residual(h, reg, out.x, b);
  for (int step = 0; step < 3 && out.residual > 1e-14; ++step) {
    const Vector r = b - (h.multiply(out.x) - reg * out.x);
    Vector candidate = out.x + ldlt.solve(-r);
    const double res = relative_residual(h, reg, candidate, b);
    if (!(res < out.residual)) break;
    out.x = std::move(candidate);
    out.residual = res;
  }
  return out;
}

SymSolve solve_sym_escalating(const SparseSymMatrix& h, const Vector& b) {
  constexpr double kLadder[] = {0.0, 1e-12, 1e-9, 1e-6};
  SymSolve best;
  bool have = false;
  for (double reg : kLadder) {
    try {
      SymSolve s = solve_sym(h, b, reg);
      if (s.residual <= kSolveTolerance) return s;
      if (!have || s.residual < best.residual) {
        best = std::move(s);
        have = true;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularSystem) throw;
    }
  }
  if (!have) {
    throw Error(ErrorCode::kSingularSystem,
                "singular at every regularization level");
  }
  return best;
}

}  // namespace emot
