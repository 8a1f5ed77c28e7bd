#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spdc/baselines.hpp"
#include "spdc/spdc.hpp"

namespace spdc {

/// Where the data comes from. A synthetic source without a seed is regenerated
/// from each run seed.
struct DataSource {
  enum class Kind { file, synthetic, sparse } kind = Kind::synthetic;
  std::string path;                 // file
  std::size_t dim = 0;              // file: minimum dimension
  std::size_t n = 0, d = 0;         // synthetic / sparse
  double density = 0.01;            // sparse
  std::optional<std::uint64_t> seed;
};

struct SolverSpec {
  std::string name;  // unique; file stem of its traces
  enum class Method { spdc, sdca, afg } method = Method::spdc;
  SolverConfig spdc;       // passes and seed are overwritten per run
  BaselineConfig baseline;
};

struct ExperimentSpec {
  DataSource data;
  Loss loss;
  Regularizer reg = Regularizer::l2(1e-3);
  std::vector<SolverSpec> solvers;
  std::vector<std::uint64_t> seeds{1};
  double passes = 10.0;
  std::size_t records_per_pass = 1;
  bool reference = false;  // solve for (x*, y*) so traces carry dist_x / dist_y
  bool wall_time = false;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::string output_dir;   // empty = no files
};

/// JSON round trip; the schema is the one written to experiment.json.
ExperimentSpec experiment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentSpec& spec);
ExperimentSpec load_experiment(const std::string& path);

struct AggregateRow {
  std::string solver;
  double pass = 0.0;
  double mean_gap = 0.0;
  double median_gap = 0.0;
  std::size_t count = 0;
};

struct ExperimentResult {
  /// traces[s * seeds.size() + r] is solver s with seed r, labelled "<name>_seed<seed>".
  std::vector<ConvergenceTrace> traces;
  std::vector<AggregateRow> aggregate;
};

DataSet materialize(const DataSource& src, std::uint64_t run_seed);

/// Per-solver mean and median of the gap column, record by record, over the
/// traces of that solver (truncated to the shortest one). Solvers in spec order.
std::vector<AggregateRow> aggregate_traces(const std::vector<std::string>& solvers,
                                           const std::vector<ConvergenceTrace>& traces, std::size_t seeds);

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

/// Runs every (solver, seed) pair on a thread pool. With an output directory,
/// writes <name>_seed<seed>.csv per run, aggregate.csv and experiment.json.
/// Errors from one run are rethrown with the solver name prefixed.
ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace spdc
