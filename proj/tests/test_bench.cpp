#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spdc/baselines.hpp"
#include "spdc/dataset.hpp"
#include "spdc/errors.hpp"
#include "spdc/experiment.hpp"
#include "spdc/objectives.hpp"
#include "spdc/plot.hpp"
#include "spdc/trace.hpp"

using namespace spdc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("spdc_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.data.kind = DataSource::Kind::synthetic;
  spec.data.n = 40;
  spec.data.d = 8;
  spec.data.seed = 3;
  spec.reg = Regularizer::l2(1e-2);
  SolverSpec spdc_solver;
  spdc_solver.name = "spdc";
  SolverSpec sdca;
  sdca.name = "sdca";
  sdca.method = SolverSpec::Method::sdca;
  spec.solvers = {spdc_solver, sdca};
  spec.seeds = {1, 2, 3};
  spec.passes = 4;
  return spec;
}

ConvergenceTrace trace_of(std::vector<std::pair<double, double>> pass_gap, std::string label) {
  ConvergenceTrace t;
  t.label = std::move(label);
  for (auto [p, g] : pass_gap) t.records.push_back({p, 1.0 + g, 1.0, g, 0.0, 0.0, 0.0});
  return t;
}

}  // namespace

TEST_CASE("primal and dual objectives on hand-checked points") {
  DataSetBuilder builder;
  builder.add_row({{0, 1.0}}, 1.0);
  const DataSet one = std::move(builder).build();
  const Loss sq{LossKind::squared, 0.0};
  CHECK(eval_primal(one, sq, Regularizer::l2(1.0), std::vector<double>{0.0}) == 0.5);
  CHECK(eval_primal(one, sq, Regularizer::l2(1.0), std::vector<double>{0.5}) == 0.25);

  DataSetBuilder with_empty;
  with_empty.add_row({{0, 1.0}}, 1.0);
  with_empty.add_row({}, 2.0);
  const DataSet two = std::move(with_empty).build();
  // The empty row contributes phi(0; 2) = 2.
  CHECK(eval_primal(two, sq, Regularizer::l2(1.0), std::vector<double>{0.0}) == doctest::Approx(1.25));

  const Loss sh{LossKind::smoothed_hinge, 0.0};
  const DataSet cls = generate_sparse(20, 5, 0.5, 2);
  const Regularizer reg = Regularizer::l2(0.1);
  CHECK(eval_dual(cls, sh, reg, std::vector<double>(20, 0.0)) == 0.0);
  std::vector<double> bad(20, 0.0);
  bad[3] = 2.0 * cls.label(3);
  CHECK(eval_dual(cls, sh, reg, bad) == -kInf);

  const SaddlePoint ref = reference_solution(cls, sh, reg);
  CHECK(eval_dual(cls, sh, reg, ref.y) == doctest::Approx(ref.primal).epsilon(1e-9));
  CHECK(saddle_value(cls, sh, reg, ref.x, ref.y) == doctest::Approx(ref.primal).epsilon(1e-9));
}

TEST_CASE("trace CSV: byte-stable round trip and parse errors") {
  ConvergenceTrace t = trace_of({{0.0, 1.0}, {1.0, 1e-3}, {2.0, 1.0 / 3.0}}, "x");
  t.records[1].dist_x = std::nan("");
  std::ostringstream out;
  write_trace_csv(out, t);
  CHECK(out.str().rfind(std::string(kTraceHeader) + "\n", 0) == 0);
  std::istringstream in(out.str());
  const ConvergenceTrace back = read_trace_csv(in, "x");
  REQUIRE(back.records.size() == 3);
  CHECK(back.records[2].gap == t.records[2].gap);
  CHECK(std::isnan(back.records[1].dist_x));
  std::ostringstream again;
  write_trace_csv(again, back);
  CHECK(again.str() == out.str());

  std::istringstream no_header("1,2,3\n");
  CHECK_THROWS_AS(read_trace_csv(no_header), DataError);
  std::istringstream short_row(std::string(kTraceHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(read_trace_csv(short_row), ParseError);
  std::istringstream junk(std::string(kTraceHeader) + "\n1,2,3,4,5,6,seven\n");
  CHECK_THROWS_AS(read_trace_csv(junk), ParseError);

  CHECK(passes_to_gap(t, 1e-2) == 1.0);
  CHECK(passes_to_gap(t, 1e-9) == kInf);
}

TEST_CASE("experiment: deterministic files and a recomputable aggregate") {
  ExperimentSpec spec = small_spec();
  const fs::path dir_a = scratch_dir("a"), dir_b = scratch_dir("b");
  spec.output_dir = dir_a.string();
  const ExperimentResult ra = run_experiment(spec);
  spec.output_dir = dir_b.string();
  spec.threads = 3;
  run_experiment(spec);

  REQUIRE(ra.traces.size() == 6);
  CHECK(ra.traces[4].label == "sdca_seed2");
  for (const char* f : {"spdc_seed1.csv", "spdc_seed3.csv", "sdca_seed2.csv", "aggregate.csv"}) {
    REQUIRE(fs::exists(dir_a / f));
    CHECK(slurp(dir_a / f) == slurp(dir_b / f));
  }

  // Recompute the aggregate from the raw files.
  std::vector<ConvergenceTrace> loaded;
  for (const char* s : {"spdc", "sdca"}) {
    for (int seed = 1; seed <= 3; ++seed) {
      loaded.push_back(load_trace_csv((dir_a / (std::string(s) + "_seed" + std::to_string(seed) + ".csv")).string()));
    }
  }
  const std::vector<AggregateRow> agg = aggregate_traces({"spdc", "sdca"}, loaded, 3);
  std::ostringstream csv;
  write_aggregate_csv(csv, agg);
  CHECK(csv.str() == slurp(dir_a / "aggregate.csv"));
  REQUIRE(agg.size() == 10);
  CHECK(agg[0].count == 3);
  std::vector<double> gaps;
  for (int k = 0; k < 3; ++k) gaps.push_back(loaded[k].records[2].gap);
  std::sort(gaps.begin(), gaps.end());
  CHECK(agg[2].median_gap == gaps[1]);
  CHECK(agg[2].mean_gap == doctest::Approx((gaps[0] + gaps[1] + gaps[2]) / 3.0).epsilon(1e-15));

  ExperimentSpec expected = small_spec();
  expected.output_dir = dir_a.string();
  const ExperimentSpec back = load_experiment((dir_a / "experiment.json").string());
  CHECK(to_json(back) == to_json(expected));
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("experiment: zero passes, JSON schema and errors") {
  ExperimentSpec spec = small_spec();
  spec.passes = 0;
  const ExperimentResult r = run_experiment(spec);
  for (const ConvergenceTrace& t : r.traces) CHECK(t.records.size() == 1);

  const nlohmann::json j = nlohmann::json::parse(R"({
    "data": {"source": "sparse", "n": 30, "d": 50, "density": 0.1, "seed": 4},
    "loss": "smoothed-hinge", "lambda": 1e-3, "lambda1": 1e-4,
    "solvers": [{"method": "spdc", "variant": "minibatch", "batch_size": 3, "lazy": true},
                {"method": "afg"}],
    "seeds": [5, 6], "passes": 2
  })");
  const ExperimentSpec parsed = experiment_from_json(j);
  CHECK(parsed.data.kind == DataSource::Kind::sparse);
  CHECK(parsed.reg.kind == RegKind::elastic_net);
  REQUIRE(parsed.solvers.size() == 2);
  CHECK(parsed.solvers[0].name == "spdc_minibatch3");
  CHECK(parsed.solvers[0].spdc.lazy);
  CHECK(parsed.solvers[1].name == "afg");
  CHECK(to_json(experiment_from_json(to_json(parsed))) == to_json(parsed));

  nlohmann::json dup = j;
  dup["solvers"] = nlohmann::json::array({{{"method", "afg"}}, {{"method", "afg"}}});
  CHECK_THROWS_AS(experiment_from_json(dup), ConfigError);
  nlohmann::json wrong_type = j;
  wrong_type["passes"] = "many";
  CHECK_THROWS_AS(experiment_from_json(wrong_type), ConfigError);

  // SDCA rejects the elastic net; the error names the failing solver.
  ExperimentSpec failing = experiment_from_json(j);
  failing.solvers.push_back(SolverSpec{"dual", SolverSpec::Method::sdca, {}, {}});
  try {
    run_experiment(failing);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).rfind("dual: ", 0) == 0);
  }
}

TEST_CASE("plot: one vertex per record, clamped gaps, ordered legend") {
  const ConvergenceTrace a = trace_of({{0.0, 1.0}, {1.0, 1e-4}, {2.0, 0.0}, {3.0, -1e-20}}, "first & <a>");
  ConvergenceTrace b = trace_of({{0.0, 1.0}, {1.0, 0.5}}, "second");
  b.records.push_back({2.0, 0.0, 0.0, std::nan(""), 0.0, 0.0, 0.0});
  std::ostringstream out;
  write_svg(out, {a, b});
  const std::string svg = out.str();

  std::vector<std::string> points;
  for (std::size_t at = svg.find("points=\""); at != std::string::npos; at = svg.find("points=\"", at + 1)) {
    const std::size_t open = at + 8;
    points.push_back(svg.substr(open, svg.find('"', open) - open));
  }
  REQUIRE(points.size() == 2);
  auto vertices = [](const std::string& s) {
    std::istringstream in(s);
    std::string v;
    std::size_t k = 0;
    while (in >> v) ++k;
    return k;
  };
  CHECK(vertices(points[0]) == 4);
  CHECK(vertices(points[1]) == 2);
  // Zero and negative gaps sit on the floor, i.e. share the lowest y coordinate.
  std::istringstream in(points[0]);
  std::string v0, v1, v2, v3;
  in >> v0 >> v1 >> v2 >> v3;
  CHECK(v2.substr(v2.find(',')) == v3.substr(v3.find(',')));

  const std::size_t first = svg.find("first &amp; &lt;a&gt;");
  const std::size_t second = svg.find("second");
  CHECK(first != std::string::npos);
  CHECK(second != std::string::npos);
  CHECK(first < second);
  CHECK_THROWS_AS(write_svg(out, {}), ConfigError);
}
