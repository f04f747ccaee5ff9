#include <doctest.h>

#include <cmath>

#include "emot/apdagd.hpp"
#include "emot/errors.hpp"
#include "emot/mot_dual.hpp"
#include "test_support.hpp"

using namespace emot;
using namespace emot::testing;

namespace {

// f(z) = -curv * |z|^2 in any dimension; optionally reports every value as
// clamped.
class Paraboloid final : public DualPotential {
 public:
  Paraboloid(std::size_t dim, double curv, bool overflow = false)
      : dim_(dim), curv_(curv), overflow_(overflow) {}
  std::size_t n() const override { return 0; }
  std::size_t d() const override { return 0; }
  std::size_t dim() const override { return dim_; }
  double eta() const override { return 1.0; }
  const Vector& column_weights() const override { return empty_; }
  DenseMatrix log_plan(const Vector&) const override { return {}; }
  Evaluation evaluate(const Vector& z) const override {
    return {-curv_ * z.squaredNorm(), overflow_, overflow_ ? "plan" : ""};
  }
  Vector gradient(const Vector& z) const override { return -2 * curv_ * z; }
  SparseSymMatrix hessian(const Vector&, const HessianOptions&) const override { return {}; }
  SparseSymMatrix block_hessian(const Vector&) const override { return {}; }

 private:
  std::size_t dim_;
  double curv_;
  bool overflow_;
  Vector empty_;
};

void check_history(const DualPotential& f, const ApdagdResult& res) {
  double beta = 0.0;
  for (const ApdagdStep& s : res.history) {
    CHECK(s.beta == beta + s.alpha);
    CHECK(s.m > 0);
    CHECK(s.beta >= beta);
    beta = s.beta;
    REQUIRE(s.z.size() > 0);
    const Vector step = s.z - s.lambda;
    const double model = f.evaluate(s.lambda).value + f.gradient(s.lambda).dot(step) -
                         0.5 * s.m * step.squaredNorm();
    CHECK(f.evaluate(s.z).value >= model);
    CHECK(s.z.allFinite());
  }
}

}  // namespace

TEST_CASE("apdagd on a one-dimensional concave quadratic") {
  const Paraboloid f(1, 1.0);
  ApdagdConfig cfg;
  cfg.max_iter = 200;
  cfg.keep_iterates = true;
  const ApdagdResult res = run_apdagd(f, Vector::Constant(1, 3.0), cfg);
  CHECK(std::abs(res.z(0)) <= 1e-8);
  // L = 2 here; starting from L0 = 1 the estimate never needs to pass 2L.
  for (const ApdagdStep& s : res.history) CHECK(s.m <= 4.0);
  check_history(f, res);
  for (std::size_t k = 10; k < res.history.size(); ++k) {
    if (std::abs(res.history[k - 1].z(0)) < 1e-300) break;
    CHECK(std::abs(res.history[k].z(0)) <= std::abs(res.history[k - 1].z(0)));
  }
}

TEST_CASE("apdagd acceptance holds post hoc on a dual potential") {
  Rng rng(1);
  const MotProblem p = random_mot(rng, 4, 2, 5.0);
  const MotPotential f(p);
  ApdagdConfig cfg;
  cfg.max_iter = 100;
  cfg.keep_iterates = true;
  ConvergenceTrace trace;
  const ApdagdResult res = run_apdagd(f, Vector::Zero(f.dim()), cfg, &trace);
  CHECK(res.iterations == 100);
  CHECK(trace.records().size() == 100);
  for (const auto& r : trace.records()) CHECK(r.stage == "apdagd");
  check_history(f, res);
  CHECK(res.objective > f.evaluate(Vector::Zero(f.dim())).value);
}

TEST_CASE("apdagd early exit and errors") {
  const Paraboloid f(3, 0.5);
  ApdagdConfig cfg;
  cfg.grad_tol = 1e-6;
  const ApdagdResult res = run_apdagd(f, Vector::Ones(3), cfg);
  CHECK(res.converged);
  CHECK(res.grad_inf <= 1e-6);
  CHECK(res.iterations < cfg.max_iter);
  CHECK(res.history.front().z.size() == 0);

  const Paraboloid bad(2, 1.0, true);
  cfg.max_doublings = 5;
  try {
    run_apdagd(bad, Vector::Ones(2), cfg);
    FAIL("expected stall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kAdaptiveStall);
  }
  CHECK_THROWS_AS(run_apdagd(f, Vector::Ones(2), {}), Error);
  ApdagdConfig zero;
  zero.l0 = 0;
  CHECK_THROWS_AS(zero.validate(), Error);
}
