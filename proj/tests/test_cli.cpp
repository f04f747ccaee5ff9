#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "emot/cli.hpp"
#include "emot/errors.hpp"
#include "emot/experiments.hpp"
#include "emot/io.hpp"
#include "emot/mot_dual.hpp"

using namespace emot;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("emot_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> parse_summary(const fs::path& p) {
  std::map<std::string, std::string> kv;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

int run(std::vector<std::string> args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("load_matrix") {
  const fs::path dir = scratch_dir("io");
  write(dir / "m.txt", "# header comment\n1, 2 3\n\n4;5,6\n");
  const DenseMatrix m = load_matrix(dir / "m.txt");
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 3);
  CHECK(m(1, 2) == 6);

  write(dir / "ragged.txt", "1 2\n3\n");
  try {
    load_matrix(dir / "ragged.txt");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(std::string(e.what()).find("ragged.txt:2") != std::string::npos);
  }
  write(dir / "nan.txt", "1 nan\n");
  CHECK(code_of([&] { load_matrix(dir / "nan.txt"); }) == ErrorCode::kParse);
  write(dir / "inf.txt", "1 inf\n");
  CHECK(code_of([&] { load_matrix(dir / "inf.txt"); }) == ErrorCode::kParse);
  write(dir / "word.txt", "1 two\n");
  CHECK(code_of([&] { load_matrix(dir / "word.txt"); }) == ErrorCode::kParse);
  write(dir / "empty.txt", "# nothing\n");
  CHECK(code_of([&] { load_matrix(dir / "empty.txt"); }) == ErrorCode::kParse);
  CHECK(code_of([&] { load_matrix(dir / "missing.txt"); }) == ErrorCode::kIo);

  write(dir / "col.txt", "0.25\n0.75\n");
  write(dir / "row.txt", "0.25 0.75\n");
  CHECK(load_vector(dir / "col.txt") == load_vector(dir / "row.txt"));
  CHECK(load_vector(dir / "row.txt").size() == 2);
  CHECK(code_of([&] { load_vector(dir / "m.txt"); }) == ErrorCode::kSizeMismatch);

  write_file_atomic(dir / "atomic.txt", "abc");
  CHECK(slurp(dir / "atomic.txt") == "abc");
  CHECK_FALSE(fs::exists(dir / "atomic.txt.tmp"));
}

TEST_CASE("expected_positions") {
  const std::size_t n = 6;
  const Vector ident = expected_positions(DenseMatrix::Identity(n, n) / n);
  for (std::size_t j = 0; j < n; ++j) CHECK(ident(j) == doctest::Approx(j + 1.0));
  const Vector uni = expected_positions(DenseMatrix::Constant(n, n, 1.0 / (n * n)));
  for (std::size_t j = 0; j < n; ++j) CHECK(uni(j) == doctest::Approx(3.5));
  DenseMatrix zero_col = DenseMatrix::Identity(n, n);
  zero_col(2, 2) = 0;
  CHECK(code_of([&] { expected_positions(zero_col); }) == ErrorCode::kZeroColumn);
}

TEST_CASE("ranking run: gradient, positions and feasibility") {
  SolveRequest req;
  req.solver = SolverKind::kSinkhorn;
  req.warm_start = false;
  req.iters = 100;
  const SmotProblem p = build_ranking(200, kRankingTopPositions, kRankingThreshold, 1200, 7);
  const RunOutput run = solve_smot(p, req);
  CHECK(run.summary.converged);
  CHECK(run.trace.records().back().grad_inf <= 1e-10);
  CHECK(run.summary.violation_kind == "min");
  CHECK(run.summary.violation >= -1e-8);

  const Vector pos = expected_positions(run.plan);
  for (std::size_t j = 0; j < p.n; ++j) {
    double num = 0, den = 0;
    for (std::size_t k = 0; k < p.n; ++k) {
      num += run.plan(k, j) * static_cast<double>(k + 1);
      den += run.plan(k, j);
    }
    CHECK(pos(j) == doctest::Approx(num / den).epsilon(1e-12));
  }
}

TEST_CASE("summary violation agrees with the recovered primal") {
  SolveRequest req;
  req.n1 = 10;
  const MotProblem p = build_option_pricing(40, std::nullopt, 300);
  const RunOutput run = solve_mot(p, req);
  const PrimalRecovery rec = recover_primal(p, MotDual::unpack(run.z, p.n, p.d));
  CHECK(std::abs(run.summary.violation - (rec.p * p.v - p.w).cwiseAbs().sum()) <= 1e-12);
  CHECK(std::abs(run.summary.row_error - (rec.p.rowwise().sum() - p.r).lpNorm<1>()) <= 1e-12);
  CHECK(run.summary.warm_levels == 5);
  CHECK(run.summary.to_text().find("violation_kind = l1\n") != std::string::npos);
}

TEST_CASE("cli usage errors") {
  CHECK(run({}) == 1);
  CHECK(run({"bogus"}) == 1);
  CHECK(run({"solve", "mot"}) == 1);
  CHECK(run({"experiment", "ranking", "--solver", "magic"}) == 1);
  CHECK(run({"experiment", "balance", "--timing", "maybe"}) == 1);
  CHECK(run({"--help"}) == 0);
  std::string err;
  CHECK(run({"solve", "mot", "--cost", "/nonexistent/c", "--row", "r", "--col", "c",
             "--v", "v", "--w", "w", "--epsilon", "0.1"},
            nullptr, &err) == 1);
  CHECK(err.find("error:") != std::string::npos);
}

TEST_CASE("cli solve from files") {
  const fs::path dir = scratch_dir("solve");
  const MotProblem p = build_option_pricing(8, std::nullopt, 50);
  auto dump = [&](const std::string& name, const DenseMatrix& m) {
    std::ostringstream os;
    os.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
      os << "\n";
    }
    write(dir / name, os.str());
  };
  dump("cost.csv", p.cost);
  dump("r.csv", p.r);
  dump("c.csv", p.c);
  dump("v.csv", p.v);
  dump("w.csv", p.w);
  const std::vector<std::string> base{
      "solve", "mot", "--cost", (dir / "cost.csv").string(), "--row", (dir / "r.csv").string(),
      "--col", (dir / "c.csv").string(), "--v", (dir / "v.csv").string(), "--w",
      (dir / "w.csv").string(), "--eta", "50", "--epsilon", "0.25"};

  auto args = base;
  for (const char* a : {"--rho", "1.0", "--n1", "0", "--n2", "40", "--trace"}) args.push_back(a);
  args.push_back((dir / "trace.csv").string());
  args.push_back("--summary");
  args.push_back((dir / "summary.txt").string());
  REQUIRE(run(args) == 0);
  std::istringstream trace(slurp(dir / "trace.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(trace, line)) {
    ++rows;
    CHECK(line.find(",newton,") != std::string::npos);
  }
  CHECK(rows > 0);
  const auto kv = parse_summary(dir / "summary.txt");
  CHECK(kv.at("status") == "converged");
  CHECK(std::stod(kv.at("violation")) <= 0.25 + 1e-8);
  CHECK(kv.at("solve_ms") == "0");

  // Truncated budgets report non-convergence with exit code 2.
  args = base;
  for (const char* a : {"--solver", "apdagd", "--iters", "3", "--warm-start", "off"}) args.push_back(a);
  CHECK(run(args) == 2);

  // Shape mismatches are usage errors.
  dump("v_bad.csv", DenseMatrix::Zero(7, 1));
  args = base;
  args[9] = (dir / "v_bad.csv").string();
  std::string err;
  CHECK(run(args, nullptr, &err) == 1);
  CHECK(err.find("V has 7 rows") != std::string::npos);
}

TEST_CASE("cli experiments") {
  const fs::path dir = scratch_dir("experiments");
  std::string out;
  REQUIRE(run({"experiment", "option-pricing", "--n", "200", "--out", (dir / "op").string()}, &out) == 0);
  const auto kv = parse_summary(dir / "op" / "summary.txt");
  CHECK(std::stod(kv.at("violation")) <= 0.01);
  CHECK(std::stod(kv.at("epsilon")) == 0.01);
  CHECK(fs::exists(dir / "op" / "trace.csv"));

  REQUIRE(run({"experiment", "ranking", "--n", "200", "--eta", "1200", "--seed", "7", "--out",
               (dir / "rk").string()}) == 0);
  std::istringstream trace(slurp(dir / "rk" / "trace.csv"));
  std::string line, last;
  while (std::getline(trace, line)) last = line;
  // iter,stage,objective,grad_inf,...
  std::vector<std::string> fields;
  std::stringstream ls(last);
  for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
  REQUIRE(fields.size() == 6);
  CHECK(std::stod(fields[3]) <= 1e-10);
  CHECK(fs::exists(dir / "rk" / "positions.txt"));
}

TEST_CASE("experiments are byte-for-byte reproducible") {
  const fs::path dir = scratch_dir("determinism");
  for (const char* name : {"balance", "ranking", "option-pricing"}) {
    const std::string a = (dir / (std::string(name) + "_a")).string();
    const std::string b = (dir / (std::string(name) + "_b")).string();
    const int ca = run({"experiment", name, "--n", "48", "--seed", "3", "--out", a});
    const int cb = run({"experiment", name, "--n", "48", "--seed", "3", "--out", b});
    CHECK(ca == cb);
    CHECK(slurp(fs::path(a) / "trace.csv") == slurp(fs::path(b) / "trace.csv"));
    CHECK(slurp(fs::path(a) / "summary.txt") == slurp(fs::path(b) / "summary.txt"));
  }
}

TEST_CASE("cli verify theorem1") {
  const fs::path dir = scratch_dir("verify");
  std::string out;
  CHECK(run({"verify", "theorem1", "--out", dir.string()}, &out) == 0);
  CHECK(fs::exists(dir / "theorem1.csv"));
  CHECK(out.find("instance 3") != std::string::npos);
}
