#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "emot/errors.hpp"
#include "emot/numerics.hpp"
#include "emot/random.hpp"

using namespace emot;

namespace {

const double kNegInf = -std::numeric_limits<double>::infinity();

DenseMatrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  DenseMatrix m(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

std::vector<std::size_t> kept_by_full_sort(const DenseMatrix& m, std::size_t k) {
  std::vector<std::size_t> idx(m.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return m.data()[a] > m.data()[b];
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

TEST_CASE("log_sum_exp_rows examples") {
  CHECK(log_sum_exp_rows(mat({{0, 0}}))(0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(log_sum_exp_rows(mat({{0, kNegInf}}))(0) == 0.0);
  const Vector r = log_sum_exp_rows(mat({{0, 1}, {2, 3}}));
  const double l = std::log(1 + std::exp(1.0));
  CHECK(r(0) == doctest::Approx(l).epsilon(1e-15));
  CHECK(r(1) == doctest::Approx(2 + l).epsilon(1e-15));
  CHECK_THROWS_AS(log_sum_exp_rows(mat({{kNegInf, kNegInf}})), Error);
  CHECK_THROWS_AS(log_sum_exp_cols(mat({{0, kNegInf}, {1, kNegInf}})), Error);
}

TEST_CASE("log_sum_exp agrees with naive summation") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    DenseMatrix m(7, 9);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-20, 20);
    const Vector rows = log_sum_exp_rows(m);
    const Vector cols = log_sum_exp_cols(m);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double naive = std::log(m.row(i).array().exp().sum());
      CHECK(std::abs(rows(i) - naive) <= 1e-13 * std::abs(naive) + 1e-13);
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double naive = std::log(m.col(j).array().exp().sum());
      CHECK(std::abs(cols(j) - naive) <= 1e-13 * std::abs(naive) + 1e-13);
    }
  }
}

TEST_CASE("log_sum_exp survives magnitudes that overflow exp") {
  const Vector r = log_sum_exp_rows(mat({{1000, 1000}, {-1000, -1000}}));
  CHECK(r(0) == doctest::Approx(1000 + std::log(2.0)));
  CHECK(r(1) == doctest::Approx(-1000 + std::log(2.0)));
}

TEST_CASE("top_k_threshold examples") {
  CHECK(top_k_threshold(mat({{5, 1}, {2, 3}}), 2).kept == std::vector<std::size_t>{0, 3});
  CHECK(top_k_threshold(mat({{1, 1}, {1, 1}}), 2).kept == std::vector<std::size_t>{0, 1});
  const DenseMatrix m = mat({{.5, .1, 0}, {.05, .2, .02}, {0, .03, .1}});
  const TopK t = top_k_threshold(m, 4);
  CHECK(t.kept == kept_by_full_sort(m, 4));
  CHECK(t.kept == std::vector<std::size_t>{0, 1, 4, 8});
  CHECK(t.threshold == 0.1);
  CHECK_THROWS_AS(top_k_threshold(m, 0), Error);
  CHECK_THROWS_AS(top_k_threshold(m, 10), Error);
}

TEST_CASE("top_k_threshold matches a full stable sort") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    DenseMatrix m(6, 6);
    // Coarse values force plenty of ties.
    for (Eigen::Index i = 0; i < m.size(); ++i)
      m.data()[i] = std::floor(rng.uniform(0, 5));
    const std::size_t k = 1 + rng.next() % 36;
    const TopK t = top_k_threshold(m, k);
    CHECK(t.kept == kept_by_full_sort(m, k));
    CHECK(static_cast<std::size_t>(std::count(t.mask.begin(), t.mask.end(), true)) == k);
    double min_sel = 1e300, max_unsel = -1e300;
    for (std::size_t i = 0; i < t.mask.size(); ++i) {
      if (t.mask[i]) min_sel = std::min(min_sel, m.data()[i]);
      else max_unsel = std::max(max_unsel, m.data()[i]);
    }
    CHECK(min_sel >= max_unsel);
  }
}

TEST_CASE("SparseSymMatrix construction") {
  using E = SparseSymMatrix::Entry;
  const auto h = SparseSymMatrix::from_entries(3, {{0, 0, 1}, {2, 0, 4}, {1, 1, 2}});
  CHECK(h.coeff(0, 2) == 4);
  CHECK(h.coeff(2, 0) == 4);
  CHECK(h.full_nonzeros() == 4);
  CHECK(h.stored_nonzeros() == 3);
  CHECK(h.multiply(Vector::Ones(3)).isApprox(Vector(Eigen::Vector3d(5, 2, 4))));
  CHECK_THROWS_AS(SparseSymMatrix::from_entries(2, {E{0, 1, 1}, E{1, 0, 1}}), Error);
  CHECK_THROWS_AS(SparseSymMatrix::from_entries(2, {E{0, 2, 1}}), Error);
  CHECK_THROWS_AS(SparseSymMatrix::from_entries(2, {E{0, 0, NAN}}), Error);
  CHECK(SparseSymMatrix::from_summed_entries(2, {E{0, 1, 1}, E{1, 0, 1}}).coeff(0, 1) == 2);
  const auto dropped = h.without_index(1);
  CHECK(dropped.dim() == 2);
  CHECK(dropped.coeff(0, 1) == 4);
}

TEST_CASE("solve_sym examples") {
  {
    const auto h = SparseSymMatrix::from_entries(3, {{0, 0, -2}, {1, 1, -2}, {2, 2, -2}});
    const SymSolve s = solve_sym(h, Vector(Eigen::Vector3d(2, 4, 6)), 0.0);
    CHECK(s.x.isApprox(Vector(Eigen::Vector3d(-1, -2, -3)), 1e-15));
  }
  {
    const auto h = SparseSymMatrix::from_entries(2, {{0, 0, -2}, {0, 1, 1}, {1, 1, -2}});
    const SymSolve s = solve_sym(h, Vector(Eigen::Vector2d(1, 1)), 0.0);
    CHECK(s.x(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(s.x(1) == doctest::Approx(-1.0).epsilon(1e-14));
  }
  {
    const SparseSymMatrix h(2);
    const SymSolve s = solve_sym(h, Vector(Eigen::Vector2d(1, 0)), 1e-8);
    CHECK(s.x(0) == doctest::Approx(-1e8).epsilon(1e-14));
    CHECK(s.x(1) == 0.0);
    CHECK_THROWS_AS(solve_sym(h, Vector(Eigen::Vector2d(1, 0)), 0.0), Error);
  }
  CHECK_THROWS_AS(solve_sym(SparseSymMatrix(2), Vector::Ones(3), 1.0), Error);
}

TEST_CASE("solve_sym residual on random negative definite systems") {
  Rng rng(5);
  for (std::size_t dim : {10u, 200u, 2000u}) {
    std::vector<SparseSymMatrix::Entry> entries;
    for (std::size_t i = 0; i < dim; ++i) {
      entries.push_back({i, i, -rng.uniform(4, 8)});
      for (int t = 0; t < 3; ++t) {
        const std::size_t j = rng.next() % dim;
        if (j != i) entries.push_back({i, j, rng.uniform(-0.5, 0.5)});
      }
    }
    const auto h = SparseSymMatrix::from_summed_entries(dim, entries);
    Vector b(dim);
    for (std::size_t i = 0; i < dim; ++i) b(i) = rng.uniform(-1, 1);
    const SymSolve s = solve_sym(h, b, 0.0);
    const double res =
        (h.multiply(s.x) - b).lpNorm<Eigen::Infinity>() / std::max(1.0, b.lpNorm<Eigen::Infinity>());
    CHECK(res <= 1e-10);
    CHECK(s.residual == doctest::Approx(res).epsilon(1e-6));
    // Bitwise determinism.
    CHECK(solve_sym(h, b, 0.0).x == s.x);
  }
}

TEST_CASE("solve_sym_escalating regularizes a singular system") {
  const auto h = SparseSymMatrix::from_entries(2, {{0, 0, -1}, {0, 1, 1}, {1, 1, -1}});
  const SymSolve s = solve_sym_escalating(h, Vector(Eigen::Vector2d(1, -1)));
  CHECK(s.reg > 0.0);
  CHECK(s.x.allFinite());
}
