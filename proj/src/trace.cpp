#include "emot/trace.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "emot/errors.hpp"

namespace emot {

ConvergenceTrace::ConvergenceTrace(bool timing)
    : timing_(timing), start_(std::chrono::steady_clock::now()) {}

void ConvergenceTrace::record(const DualPotential& f, const Vector& z,
                              const std::string& stage, double objective,
                              double grad_inf) {
  TraceRecord rec;
  rec.iter = last_iter() + 1;
  rec.stage = stage;
  rec.objective = objective;
  rec.grad_inf = grad_inf;
  rec.l1_to_ref = reference_ ? l1_distance(plan_at(f, z), *reference_)
                             : std::numeric_limits<double>::quiet_NaN();
  if (timing_) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start_)
                      .count();
  }
  append(std::move(rec));
}

void ConvergenceTrace::append(TraceRecord rec) {
  if (!records_.empty() && rec.iter <= records_.back().iter) {
    throw Error(ErrorCode::kInvalidArgument,
                "trace iteration indices must be strictly increasing");
  }
  records_.push_back(std::move(rec));
}

void ConvergenceTrace::write_csv(std::ostream& out) const {
  char buf[256];
  for (const TraceRecord& r : records_) {
    std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%.17g,%.17g,%.17g\n", r.iter,
                  r.stage.c_str(), r.objective, r.grad_inf, r.l1_to_ref,
                  r.wall_ms);
    out << buf;
  }
}

DenseMatrix plan_at(const DualPotential& f, const Vector& z) {
  DenseMatrix p = f.log_plan(z);
  bool clamped = false;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    p.data()[i] = capped_exp(p.data()[i], &clamped);
  }
  if (clamped) throw Error(ErrorCode::kPotentialOverflow, "plan");
  return p;
}

double l1_distance(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kSizeMismatch, "plans differ in shape");
  }
  CompensatedSum s;
  for (Eigen::Index i = 0; i < a.size(); ++i) s.add(std::abs(a.data()[i] - b.data()[i]));
  return s.value();
}

}  // namespace emot
