// spdc: command-line front end (solve, bench, gen, plot).
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spdc/baselines.hpp"
#include "spdc/dataset.hpp"
#include "spdc/errors.hpp"
#include "spdc/experiment.hpp"
#include "spdc/plot.hpp"
#include "spdc/spdc.hpp"
#include "spdc/trace.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct DataArgs {
  std::string file;
  std::size_t dim = 0;
  std::vector<std::size_t> synthetic;  // n d
  std::vector<double> sparse;          // n d density
  std::uint64_t data_seed = 1;

  void attach(CLI::App* cmd) {
    auto* f = cmd->add_option("--data", file, "LIBSVM file");
    cmd->add_option("--dim", dim, "minimum feature dimension (overrides the inferred d when larger)");
    auto* s = cmd->add_option("--synthetic", synthetic, "dense synthetic ridge data: N D")->expected(2);
    auto* p = cmd->add_option("--sparse", sparse, "sparse unit-norm classification data: N D DENSITY")->expected(3);
    cmd->add_option("--data-seed", data_seed, "seed of the synthetic generators");
    f->excludes(s)->excludes(p);
    s->excludes(p);
  }

  spdc::DataSet load() const {
    if (!file.empty()) return spdc::load_libsvm(file, dim);
    if (!synthetic.empty()) return spdc::generate_synthetic(synthetic[0], synthetic[1], data_seed);
    if (!sparse.empty()) {
      return spdc::generate_sparse(static_cast<std::size_t>(sparse[0]), static_cast<std::size_t>(sparse[1]),
                                   sparse[2], data_seed);
    }
    throw spdc::ConfigError("one of --data, --synthetic or --sparse is required");
  }
};

void print_summary(const spdc::ConvergenceTrace& trace) {
  if (trace.records.empty()) return;
  const spdc::TraceRecord& r = trace.records.back();
  std::printf("passes %.6g  primal %.16e  dual %.16e  gap %.6e\n", r.pass, r.primal, r.dual, r.gap);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic primal-dual coordinate method and baselines for regularized ERM"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "run one solver and write its convergence trace");
  DataArgs solve_data;
  solve_data.attach(solve);
  std::string loss_name = "squared", method = "spdc", variant = "basic", trace_path;
  double lambda = 1e-3, lambda1 = 0.0, delta = 0.0, passes = 10.0;
  std::optional<double> alpha, tau, sigma, theta, step;
  std::size_t batch = 1, records_per_pass = 1;
  std::uint64_t seed = 1;
  bool lazy = false, reference = false, wall_time = false;
  solve->add_option("--loss", loss_name, "squared | smoothed-hinge | logistic | hinge")->capture_default_str();
  solve->add_option("--lambda", lambda, "l2 coefficient (lambda2)")->capture_default_str();
  solve->add_option("--lambda1", lambda1, "l1 coefficient (elastic net)")->capture_default_str();
  solve->add_option("--method", method, "spdc | sdca | afg")->capture_default_str();
  solve->add_option("--variant", variant, "basic | minibatch | weighted")->capture_default_str();
  solve->add_option("-m,--batch-size", batch, "mini-batch size")->capture_default_str();
  solve->add_option("--alpha", alpha, "weighted sampling mix in (0, 1); default optimal");
  solve->add_option("--delta", delta, "perturbation for non-smooth or non-strongly-convex problems");
  solve->add_option("--passes", passes, "equivalent passes over the data")->capture_default_str();
  solve->add_option("--seed", seed, "solver seed")->capture_default_str();
  solve->add_option("--tau", tau, "primal step override");
  solve->add_option("--sigma", sigma, "dual step override");
  solve->add_option("--theta", theta, "extrapolation override");
  solve->add_option("--step", step, "AFG step size override");
  solve->add_flag("--lazy", lazy, "delayed primal updates for sparse data");
  solve->add_option("--records-per-pass", records_per_pass, "trace records per pass")->capture_default_str();
  solve->add_flag("--reference", reference, "solve to high accuracy first and trace distances to it");
  solve->add_flag("--wall-time", wall_time, "record elapsed milliseconds");
  solve->add_option("-o,--trace", trace_path, "trace CSV path (default: stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "run an experiment spec (JSON)");
  std::string spec_path, out_dir;
  std::size_t threads = 0;
  bench->add_option("spec", spec_path, "experiment JSON")->required();
  bench->add_option("-o,--output-dir", out_dir, "override output_dir");
  bench->add_option("-j,--threads", threads, "worker threads (0 = spec / hardware)");

  // gen
  auto* gen = app.add_subcommand("gen", "write synthetic data as LIBSVM text");
  std::size_t gen_n = 0, gen_d = 0;
  std::uint64_t gen_seed = 1;
  std::optional<double> density;
  std::string gen_out;
  gen->add_option("-n", gen_n, "samples")->required();
  gen->add_option("-d", gen_d, "features")->required();
  gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen->add_option("--density", density, "sparse unit-norm classification data with this density");
  gen->add_option("-o,--output", gen_out, "output path (default: stdout)");

  // plot
  auto* plot = app.add_subcommand("plot", "render trace CSVs as an SVG of log gap vs passes");
  std::vector<std::string> trace_files;
  std::string svg_out;
  plot->add_option("traces", trace_files, "trace CSV files, legend in this order")->required();
  plot->add_option("-o,--output", svg_out, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) {
      const spdc::DataSet ds = solve_data.load();
      const spdc::Loss loss{spdc::parse_loss_kind(loss_name), 0.0};
      const spdc::Regularizer reg = spdc::Regularizer::elastic(lambda1, lambda);
      std::optional<spdc::SaddlePoint> ref;
      if (reference) {
        if (delta > 0.0) {
          const spdc::PerturbedPair p = spdc::perturb(loss, reg, delta);
          ref = spdc::reference_solution(ds, p.loss, p.reg);
        } else {
          ref = spdc::reference_solution(ds, loss, reg);
        }
      }
      spdc::TraceOptions opts;
      opts.reference = ref ? &*ref : nullptr;
      opts.records_per_pass = records_per_pass;
      opts.wall_time = wall_time;
      spdc::RunResult result;
      if (method == "spdc") {
        spdc::SolverConfig cfg;
        cfg.variant = spdc::parse_variant(variant);
        cfg.batch_size = batch;
        cfg.alpha = alpha;
        cfg.delta = delta;
        cfg.passes = passes;
        cfg.seed = seed;
        cfg.lazy = lazy;
        if (tau || sigma || theta) {
          if (!(tau && sigma && theta)) throw spdc::ConfigError("--tau, --sigma and --theta go together");
          cfg.params = spdc::StepParameters{*tau, *sigma, *theta};
        }
        result = spdc::run(ds, loss, reg, cfg, opts);
      } else {
        spdc::BaselineConfig cfg;
        cfg.method = spdc::parse_baseline_method(method);
        cfg.passes = passes;
        cfg.seed = seed;
        cfg.step = step;
        result = spdc::run_baseline(ds, loss, reg, cfg, opts);
      }
      if (trace_path.empty()) {
        spdc::write_trace_csv(std::cout, result.trace);
      } else {
        spdc::save_trace_csv(trace_path, result.trace);
        print_summary(result.trace);
      }
    } else if (*bench) {
      spdc::ExperimentSpec spec = spdc::load_experiment(spec_path);
      if (!out_dir.empty()) spec.output_dir = out_dir;
      if (threads) spec.threads = threads;
      const spdc::ExperimentResult r = spdc::run_experiment(spec);
      for (const spdc::ConvergenceTrace& t : r.traces) {
        std::printf("%-32s ", t.label.c_str());
        print_summary(t);
      }
    } else if (*gen) {
      const spdc::DataSet ds = density ? spdc::generate_sparse(gen_n, gen_d, *density, gen_seed)
                                       : spdc::generate_synthetic(gen_n, gen_d, gen_seed);
      if (gen_out.empty()) {
        spdc::write_libsvm(std::cout, ds);
      } else {
        spdc::save_libsvm(gen_out, ds);
      }
    } else if (*plot) {
      std::vector<spdc::ConvergenceTrace> traces;
      for (const std::string& f : trace_files) traces.push_back(spdc::load_trace_csv(f));
      spdc::emit_plot(traces, svg_out);
    }
  } catch (const spdc::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const spdc::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  } catch (const spdc::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kData;
  }
  return kOk;
}
