#include "spdc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "spdc/errors.hpp"

namespace spdc {

using nlohmann::json;

namespace {

const char* source_name(DataSource::Kind k) {
  switch (k) {
    case DataSource::Kind::file: return "file";
    case DataSource::Kind::synthetic: return "synthetic";
    case DataSource::Kind::sparse: return "sparse";
  }
  return "?";
}

const char* method_name(SolverSpec::Method m) {
  switch (m) {
    case SolverSpec::Method::spdc: return "spdc";
    case SolverSpec::Method::sdca: return "sdca";
    case SolverSpec::Method::afg: return "afg";
  }
  return "?";
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

}  // namespace

ExperimentSpec experiment_from_json(const json& j) {
  try {
    ExperimentSpec spec;
    const json& data = j.at("data");
    const std::string source = data.at("source").get<std::string>();
    if (source == "file") {
      spec.data.kind = DataSource::Kind::file;
      spec.data.path = data.at("path").get<std::string>();
      spec.data.dim = get_or<std::size_t>(data, "dim", 0);
    } else if (source == "synthetic" || source == "sparse") {
      spec.data.kind = source == "sparse" ? DataSource::Kind::sparse : DataSource::Kind::synthetic;
      spec.data.n = data.at("n").get<std::size_t>();
      spec.data.d = data.at("d").get<std::size_t>();
      spec.data.density = get_or<double>(data, "density", 0.01);
    } else {
      throw ConfigError("unknown data source '" + source + "'");
    }
    if (data.contains("seed") && !data["seed"].is_null()) spec.data.seed = data["seed"].get<std::uint64_t>();

    spec.loss = Loss{parse_loss_kind(get_or<std::string>(j, "loss", "squared")), 0.0};
    spec.reg = Regularizer::elastic(get_or<double>(j, "lambda1", 0.0), j.at("lambda").get<double>());
    spec.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", {1});
    spec.passes = get_or<double>(j, "passes", 10.0);
    spec.records_per_pass = get_or<std::size_t>(j, "records_per_pass", 1);
    spec.reference = get_or<bool>(j, "reference", false);
    spec.wall_time = get_or<bool>(j, "wall_time", false);
    spec.threads = get_or<std::size_t>(j, "threads", 0);
    spec.output_dir = get_or<std::string>(j, "output_dir", "");

    std::set<std::string> names;
    for (const json& s : j.at("solvers")) {
      SolverSpec solver;
      const std::string method = s.at("method").get<std::string>();
      if (method == "spdc") {
        solver.method = SolverSpec::Method::spdc;
        SolverConfig& c = solver.spdc;
        c.variant = parse_variant(get_or<std::string>(s, "variant", "basic"));
        c.batch_size = get_or<std::size_t>(s, "batch_size", 1);
        c.delta = get_or<double>(s, "delta", 0.0);
        c.lazy = get_or<bool>(s, "lazy", false);
        if (s.contains("alpha") && !s["alpha"].is_null()) c.alpha = s["alpha"].get<double>();
        if (s.contains("tau") || s.contains("sigma") || s.contains("theta")) {
          c.params = StepParameters{s.at("tau").get<double>(), s.at("sigma").get<double>(),
                                    s.at("theta").get<double>()};
        }
      } else {
        solver.method = method == "sdca" ? SolverSpec::Method::sdca : SolverSpec::Method::afg;
        solver.baseline.method = parse_baseline_method(method);
        if (s.contains("step") && !s["step"].is_null()) solver.baseline.step = s["step"].get<double>();
      }
      std::string fallback = method;
      if (method == "spdc") {
        fallback += "_" + to_string(solver.spdc.variant);
        if (solver.spdc.variant == Variant::minibatch) fallback += std::to_string(solver.spdc.batch_size);
      }
      solver.name = get_or<std::string>(s, "name", fallback);
      if (!names.insert(solver.name).second) throw ConfigError("duplicate solver name '" + solver.name + "'");
      spec.solvers.push_back(std::move(solver));
    }
    if (spec.solvers.empty()) throw ConfigError("experiment needs at least one solver");
    if (spec.seeds.empty()) throw ConfigError("experiment needs at least one seed");
    if (spec.records_per_pass == 0) throw ConfigError("records_per_pass must be >= 1");
    if (!(spec.passes >= 0.0)) throw ConfigError("passes must be non-negative");
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment spec: ") + e.what());
  }
}

json to_json(const ExperimentSpec& spec) {
  json data;
  data["source"] = source_name(spec.data.kind);
  if (spec.data.kind == DataSource::Kind::file) {
    data["path"] = spec.data.path;
    data["dim"] = spec.data.dim;
  } else {
    data["n"] = spec.data.n;
    data["d"] = spec.data.d;
    if (spec.data.kind == DataSource::Kind::sparse) data["density"] = spec.data.density;
  }
  data["seed"] = spec.data.seed ? json(*spec.data.seed) : json(nullptr);

  json solvers = json::array();
  for (const SolverSpec& s : spec.solvers) {
    json o;
    o["name"] = s.name;
    o["method"] = method_name(s.method);
    if (s.method == SolverSpec::Method::spdc) {
      const SolverConfig& c = s.spdc;
      o["variant"] = to_string(c.variant);
      o["batch_size"] = c.batch_size;
      o["delta"] = c.delta;
      o["lazy"] = c.lazy;
      if (c.alpha) o["alpha"] = *c.alpha;
      if (c.params) {
        o["tau"] = c.params->tau;
        o["sigma"] = c.params->sigma;
        o["theta"] = c.params->theta;
      }
    } else if (s.baseline.step) {
      o["step"] = *s.baseline.step;
    }
    solvers.push_back(std::move(o));
  }

  json j;
  j["data"] = std::move(data);
  j["loss"] = to_string(spec.loss.kind);
  j["lambda"] = spec.reg.lambda2;
  j["lambda1"] = spec.reg.lambda1;
  j["solvers"] = std::move(solvers);
  j["seeds"] = spec.seeds;
  j["passes"] = spec.passes;
  j["records_per_pass"] = spec.records_per_pass;
  j["reference"] = spec.reference;
  j["wall_time"] = spec.wall_time;
  j["threads"] = spec.threads;
  j["output_dir"] = spec.output_dir;
  return j;
}

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return experiment_from_json(j);
}

DataSet materialize(const DataSource& src, std::uint64_t run_seed) {
  const std::uint64_t seed = src.seed.value_or(run_seed);
  switch (src.kind) {
    case DataSource::Kind::file: return load_libsvm(src.path, src.dim);
    case DataSource::Kind::synthetic: return generate_synthetic(src.n, src.d, seed);
    case DataSource::Kind::sparse: return generate_sparse(src.n, src.d, src.density, seed);
  }
  throw ConfigError("unknown data source");
}

std::vector<AggregateRow> aggregate_traces(const std::vector<std::string>& solvers,
                                           const std::vector<ConvergenceTrace>& traces, std::size_t seeds) {
  if (traces.size() != solvers.size() * seeds) throw ConfigError("aggregate: trace count mismatch");
  std::vector<AggregateRow> rows;
  std::vector<double> gaps(seeds);
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    std::size_t len = traces[s * seeds].records.size();
    for (std::size_t r = 1; r < seeds; ++r) len = std::min(len, traces[s * seeds + r].records.size());
    for (std::size_t k = 0; k < len; ++k) {
      double sum = 0.0;
      for (std::size_t r = 0; r < seeds; ++r) {
        gaps[r] = traces[s * seeds + r].records[k].gap;
        sum += gaps[r];
      }
      std::sort(gaps.begin(), gaps.end());
      const double median = seeds % 2 ? gaps[seeds / 2] : 0.5 * (gaps[seeds / 2 - 1] + gaps[seeds / 2]);
      rows.push_back({solvers[s], traces[s * seeds].records[k].pass, sum / static_cast<double>(seeds), median, seeds});
    }
  }
  return rows;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "solver,pass,mean_gap,median_gap,count\n";
  char buf[128];
  for (const AggregateRow& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.16e,%.16e,%.16e,%zu\n", r.pass, r.mean_gap, r.median_gap, r.count);
    out << r.solver << buf;
  }
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.solvers.empty()) throw ConfigError("experiment needs at least one solver");
  if (spec.seeds.empty()) throw ConfigError("experiment needs at least one seed");

  // One data set (and reference) per distinct data seed.
  std::map<std::uint64_t, std::size_t> data_index;
  std::vector<DataSet> datasets;
  for (std::uint64_t seed : spec.seeds) {
    const std::uint64_t key = spec.data.seed.value_or(seed);
    if (data_index.contains(key)) continue;
    data_index[key] = datasets.size();
    datasets.push_back(materialize(spec.data, seed));
  }
  std::vector<SaddlePoint> refs;
  if (spec.reference) {
    for (const DataSet& ds : datasets) refs.push_back(reference_solution(ds, spec.loss, spec.reg));
  }

  const std::size_t runs = spec.solvers.size() * spec.seeds.size();
  ExperimentResult result;
  result.traces.resize(runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t job = next++; job < runs; job = next++) {
      const SolverSpec& solver = spec.solvers[job / spec.seeds.size()];
      const std::uint64_t seed = spec.seeds[job % spec.seeds.size()];
      const std::size_t di = data_index.at(spec.data.seed.value_or(seed));
      TraceOptions opts;
      opts.reference = spec.reference ? &refs[di] : nullptr;
      opts.records_per_pass = spec.records_per_pass;
      opts.wall_time = spec.wall_time;
      try {
        RunResult r;
        if (solver.method == SolverSpec::Method::spdc) {
          SolverConfig cfg = solver.spdc;
          cfg.passes = spec.passes;
          cfg.seed = seed;
          r = run(datasets[di], spec.loss, spec.reg, cfg, opts);
        } else {
          BaselineConfig cfg = solver.baseline;
          cfg.passes = spec.passes;
          cfg.seed = seed;
          r = run_baseline(datasets[di], spec.loss, spec.reg, cfg, opts);
        }
        r.trace.label = solver.name + "_seed" + std::to_string(seed);
        result.traces[job] = std::move(r.trace);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          try {
            throw;
          } catch (const ConfigError& e) {
            failure = std::make_exception_ptr(ConfigError(solver.name + ": " + e.what()));
          } catch (const NumericError& e) {
            failure = std::make_exception_ptr(NumericError(solver.name + ": " + e.what()));
          } catch (const DataError& e) {
            failure = std::make_exception_ptr(DataError(solver.name + ": " + e.what()));
          } catch (...) {
            failure = std::current_exception();
          }
        }
        next = runs;
      }
    }
  };

  std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, runs);
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::string> names;
  for (const SolverSpec& s : spec.solvers) names.push_back(s.name);
  result.aggregate = aggregate_traces(names, result.traces, spec.seeds.size());

  if (!spec.output_dir.empty()) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(spec.output_dir, ec);
    if (ec) throw DataError("cannot create " + spec.output_dir + ": " + ec.message());
    for (const ConvergenceTrace& t : result.traces) {
      save_trace_csv((fs::path(spec.output_dir) / (t.label + ".csv")).string(), t);
    }
    const std::string agg_path = (fs::path(spec.output_dir) / "aggregate.csv").string();
    std::ofstream agg(agg_path, std::ios::binary);
    if (!agg) throw DataError("cannot write " + agg_path);
    write_aggregate_csv(agg, result.aggregate);
    const std::string spec_path = (fs::path(spec.output_dir) / "experiment.json").string();
    std::ofstream sidecar(spec_path, std::ios::binary);
    if (!sidecar) throw DataError("cannot write " + spec_path);
    sidecar << to_json(spec).dump(2) << '\n';
  }
  return result;
}

}  // namespace spdc
