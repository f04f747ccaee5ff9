#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "emot/dual.hpp"

namespace emot {

struct TraceRecord {
  std::size_t iter = 0;
  std::string stage;
  double objective = 0.0;
  double grad_inf = 0.0;
  double l1_to_ref = 0.0;  // NaN when no reference plan is set
  double wall_ms = 0.0;
};

// Per-iteration log of a solve. Iteration numbers continue across stages.
// Wall time is only measured when `timing` is on; otherwise it is written as
// 0 so traces of identical runs are byte-identical.
class ConvergenceTrace {
 public:
  explicit ConvergenceTrace(bool timing = false);

  void set_reference(DenseMatrix plan) { reference_ = std::move(plan); }
  bool has_reference() const { return reference_.has_value(); }

  // Appends a record with the next iteration number; computes ||P - P_ref||_1
  // from the potential's plan at z when a reference is set.
  void record(const DualPotential& f, const Vector& z, const std::string& stage,
              double objective, double grad_inf);
  // Throws kInvalidArgument unless rec.iter exceeds the last recorded index.
  void append(TraceRecord rec);

  const std::vector<TraceRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  std::size_t last_iter() const { return records_.empty() ? 0 : records_.back().iter; }

  // Comma-separated rows, no header.
  void write_csv(std::ostream& out) const;

 private:
  bool timing_;
  std::chrono::steady_clock::time_point start_;
  std::optional<DenseMatrix> reference_;
  std::vector<TraceRecord> records_;
};

// Plan exp(log_plan(z)); throws kPotentialOverflow if any entry was capped.
DenseMatrix plan_at(const DualPotential& f, const Vector& z);
double l1_distance(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace emot
