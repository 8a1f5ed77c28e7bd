#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "spdc/baselines.hpp"
#include "spdc/dataset.hpp"
#include "spdc/errors.hpp"
#include "spdc/objectives.hpp"

using namespace spdc;

namespace {

DataSet one_row(double a, double b) {
  DataSetBuilder builder;
  builder.add_row({{0, a}}, b);
  return std::move(builder).build();
}

// Solves (A^T A / n + lambda I) x = A^T b / n by Gaussian elimination with partial pivoting.
std::vector<double> ridge_by_elimination(const DataSet& ds, double lambda) {
  const std::size_t d = ds.d(), n = ds.n();
  std::vector<std::vector<double>> M(d, std::vector<double>(d + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (const Entry& p : ds.row(i)) {
      for (const Entry& q : ds.row(i)) M[p.index][q.index] += p.value * q.value / n;
      M[p.index][d] += p.value * ds.label(i) / n;
    }
  }
  for (std::size_t j = 0; j < d; ++j) M[j][j] += lambda;
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < d; ++r) {
      if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
    }
    std::swap(M[c], M[piv]);
    for (std::size_t r = c + 1; r < d; ++r) {
      const double f = M[r][c] / M[c][c];
      for (std::size_t k = c; k <= d; ++k) M[r][k] -= f * M[c][k];
    }
  }
  std::vector<double> x(d);
  for (std::size_t c = d; c-- > 0;) {
    double s = M[c][d];
    for (std::size_t k = c + 1; k < d; ++k) s -= M[c][k] * x[k];
    x[c] = s / M[c][c];
  }
  return x;
}

double passes_to_gap_primal(const ConvergenceTrace& t, double pstar, double eps) {
  for (const TraceRecord& rec : t.records) {
    if (rec.primal - pstar <= eps) return rec.pass;
  }
  return kInf;
}

}  // namespace

TEST_CASE("baseline names") {
  CHECK(parse_baseline_method("sdca") == BaselineMethod::sdca);
  CHECK(parse_baseline_method("afg") == BaselineMethod::afg);
  CHECK(to_string(BaselineMethod::afg) == "afg");
  CHECK_THROWS_AS(parse_baseline_method("sgd"), ConfigError);
}

TEST_CASE("reference solution matches an independent ridge solve") {
  const DataSet ds = generate_synthetic(5, 5, 21);
  const Loss loss{LossKind::squared, 0.0};
  const double lambda = 0.05;
  const SaddlePoint ref = reference_solution(ds, loss, Regularizer::l2(lambda));
  const std::vector<double> x = ridge_by_elimination(ds, lambda);
  for (std::size_t j = 0; j < x.size(); ++j) CHECK(ref.x[j] == doctest::Approx(x[j]).epsilon(1e-10));
  CHECK(ref.primal - ref.dual <= 1e-12);
  CHECK(ref.primal - ref.dual >= -1e-12);
}

TEST_CASE("reference solution: smoothed hinge and elastic net") {
  const DataSet ds = generate_sparse(80, 30, 0.2, 5);
  const Loss loss{LossKind::smoothed_hinge, 0.0};
  for (const Regularizer& reg : {Regularizer::l2(1e-3), Regularizer::elastic(1e-3, 1e-3)}) {
    const SaddlePoint ref = reference_solution(ds, loss, reg);
    CHECK(ref.primal - ref.dual <= 1e-12);
    for (std::size_t i = 0; i < ds.n(); ++i) CHECK(loss.domain(ds.label(i)).contains(ref.y[i]));
    CHECK(eval_primal(ds, loss, reg, ref.x) == doctest::Approx(ref.primal).epsilon(1e-15));
  }
  CHECK_THROWS_AS(reference_solution(ds, Loss{LossKind::hinge, 0.0}, Regularizer::l2(1e-3)), ConfigError);
  CHECK_THROWS_AS(reference_solution(ds, loss, Regularizer::elastic(1e-3, 0.0)), ConfigError);
}

TEST_CASE("SDCA: one step solves a single sample; the saddle point is fixed; D never decreases") {
  const Loss sq{LossKind::squared, 0.0};
  {
    const DataSet ds = one_row(2.0, 3.0);
    SdcaSolver sdca(ds, sq, Regularizer::l2(0.5), 1);
    sdca.step();
    CHECK(sdca.x()[0] == doctest::Approx(2.0 * 3.0 / (4.0 + 0.5)).epsilon(1e-14));
  }
  const DataSet ds = generate_sparse(50, 20, 0.2, 9);
  const Loss loss{LossKind::smoothed_hinge, 0.0};
  const Regularizer reg = Regularizer::l2(1e-2);
  const SaddlePoint ref = reference_solution(ds, loss, reg);
  SdcaSolver fixed(ds, loss, reg, 3);
  fixed.set_dual(ref.y);
  for (int t = 0; t < 200; ++t) fixed.step();
  for (std::size_t i = 0; i < ds.n(); ++i) CHECK(fixed.y()[i] == doctest::Approx(ref.y[i]).epsilon(1e-9));

  SdcaSolver sdca(ds, loss, reg, 4);
  double prev = eval_dual(ds, loss, reg, sdca.y());
  for (int t = 0; t < 1000; ++t) {
    sdca.step();
    const double cur = eval_dual(ds, loss, reg, sdca.y());
    CHECK(cur >= prev - 1e-15);
    prev = cur;
  }
  CHECK(sdca.iteration() == 1000);
  CHECK(ref.primal - prev <= 1e-3);
  CHECK_THROWS_AS(SdcaSolver(ds, loss, Regularizer::elastic(1e-3, 1e-2), 1), ConfigError);
}

TEST_CASE("AFG: linear rate on a one-dimensional quadratic") {
  const double a = 3.0, b = 1.0, lambda = 0.1;
  const DataSet ds = one_row(a, b);
  const Loss loss{LossKind::squared, 0.0};
  const Regularizer reg = Regularizer::l2(lambda);
  const double xstar = a * b / (a * a + lambda);
  const double pstar = eval_primal(ds, loss, reg, std::vector<double>{xstar});
  const double L = a * a + lambda;
  const double rate = 1.0 - std::sqrt(lambda / L);
  BaselineConfig cfg;
  cfg.method = BaselineMethod::afg;
  cfg.passes = 40;
  const RunResult r = afg_run(ds, loss, reg, cfg);
  REQUIRE(r.trace.records.size() == 41);
  const double start = r.trace.records[0].primal - pstar + 0.5 * L * xstar * xstar;
  for (std::size_t k = 1; k < r.trace.records.size(); ++k) {
    CHECK(r.trace.records[k].primal - pstar <= 2.0 * std::pow(rate, double(k)) * start + 1e-15);
  }
}

TEST_CASE("AFG: ridge accuracy within the accelerated iteration budget") {
  const DataSet ds = generate_synthetic(50, 50, 12);
  const Loss loss{LossKind::squared, 0.0};
  const Regularizer reg = Regularizer::l2(1e-2);
  const SaddlePoint ref = reference_solution(ds, loss, reg);
  const double kappa = (ds.max_norm() * ds.max_norm() + reg.lambda2) / reg.lambda2;
  const double eps = 1e-10;
  const double budget = 10.0 * (1.0 + std::sqrt(kappa)) * std::log(1.0 / eps);
  BaselineConfig cfg;
  cfg.method = BaselineMethod::afg;
  cfg.passes = std::max(200.0, std::floor(budget));
  TraceOptions opts;
  opts.reference = &ref;
  const RunResult r = afg_run(ds, loss, reg, cfg, opts);
  const double initial = r.trace.records.front().primal - ref.primal;
  CHECK(r.trace.records[200].primal - ref.primal < 1e-6 * initial);
  CHECK(passes_to_gap_primal(r.trace, ref.primal, eps) <= budget);
  CHECK(std::isfinite(r.trace.records.back().dist_x));
}

TEST_CASE("AFG: zero feature rows converge immediately") {
  DataSetBuilder builder;
  builder.add_row({}, 1.0);
  builder.add_row({}, -2.0);
  const DataSet ds = std::move(builder).build(3);
  CHECK(ds.max_norm() == 0.0);
  BaselineConfig cfg;
  cfg.method = BaselineMethod::afg;
  cfg.passes = 5;
  const RunResult r = run_baseline(ds, Loss{LossKind::squared, 0.0}, Regularizer::l2(0.3), cfg);
  CHECK(std::abs(r.trace.records.back().gap) <= 1e-12);
}

TEST_CASE("baseline runs are deterministic and traced per pass") {
  const DataSet ds = generate_synthetic(20, 4, 2);
  const Loss loss{LossKind::squared, 0.0};
  const Regularizer reg = Regularizer::l2(1e-2);
  BaselineConfig cfg;
  cfg.passes = 3;
  const RunResult a = sdca_run(ds, loss, reg, cfg);
  const RunResult b = sdca_run(ds, loss, reg, cfg);
  CHECK(a.x == b.x);
  REQUIRE(a.trace.records.size() == 4);
  CHECK(a.trace.records.back().pass == 3.0);
  CHECK(a.trace.records.back().gap < a.trace.records.front().gap);
}
