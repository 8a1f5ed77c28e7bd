#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spdc/dataset.hpp"
#include "spdc/losses.hpp"
#include "spdc/objectives.hpp"
#include "spdc/regularizers.hpp"
#include "spdc/rng.hpp"
#include "spdc/sampling.hpp"
#include "spdc/trace.hpp"

namespace spdc {

enum class Variant { basic, minibatch, weighted };

Variant parse_variant(std::string_view name);
std::string to_string(Variant v);

struct StepParameters {
  double tau = 0.0;    // primal step
  double sigma = 0.0;  // dual step
  double theta = 0.0;  // extrapolation
};

/// Uniform / mini-batch parameters from the smoothness gamma, strong convexity
/// lambda and R = max_i ||a_i||:
///   tau = (1/R) sqrt(m gamma / (n lambda)), sigma = (1/R) sqrt(n lambda / (m gamma)),
///   theta = 1 - 1 / (n/m + R sqrt(n / (m lambda gamma))).
StepParameters compute_parameters(std::size_t n, std::size_t m, double R, double lambda, double gamma);

/// Weighted-sampling parameters with R-bar = mean_i ||a_i|| and alpha in (0, 1):
///   tau = alpha/(2 R-bar) sqrt(gamma/(n lambda)), sigma = alpha/(2 R-bar) sqrt(n lambda/gamma),
///   theta = 1 - 1 / (n/(1-alpha) + (R-bar/alpha) sqrt(n/(lambda gamma))).
StepParameters compute_weighted_parameters(std::size_t n, double mean_norm, double lambda, double gamma,
                                           double alpha);

/// alpha minimizing the weighted theta: 1 / (1 + (n / kappa_bar)^(1/4)), kappa_bar = R-bar^2 / (lambda gamma).
double optimal_alpha(std::size_t n, double kappa_bar);

struct PerturbedPair {
  Loss loss;
  Regularizer reg;
};

/// Adds (delta/2) y^2 to every phi_i* and (delta/2)||x||^2 to g. delta > 0.
PerturbedPair perturb(const Loss& loss, const Regularizer& reg, double delta);

struct SolverConfig {
  Variant variant = Variant::basic;
  std::size_t batch_size = 1;              // m; must be 1 unless variant == minibatch
  std::optional<StepParameters> params;    // explicit (tau, sigma, theta); default from the closed forms
  std::optional<double> alpha;             // weighted only; default optimal_alpha
  double delta = 0.0;                      // perturbation, 0 = none
  double passes = 10.0;                    // equivalent passes, T = ceil(passes n / m)
  std::uint64_t seed = 1;
  bool lazy = false;                       // delayed primal updates (sparse data)
};

/// One SPDC run: owns the primal/dual state and the generator stream.
///
/// Initial point: x = 0 and y_i = projection of 0 onto the conjugate domain,
/// with x^(-1) = x^(0). In lazy mode the primal vector is never touched outside
/// the support of the sampled rows; untouched coordinates are caught up in O(1)
/// from their LazyCoordState when next read. Dense and lazy modes draw the same
/// indices from the same stream.
class SpdcSolver {
 public:
  /// Validates the configuration (throws ConfigError / DataError) and resolves
  /// the step parameters.
  SpdcSolver(const DataSet& ds, const Loss& loss, const Regularizer& reg, const SolverConfig& cfg);

  /// Advances one iteration of the configured variant.
  void step();
  void step_basic();
  void step_minibatch();
  void step_weighted();

  std::uint64_t iteration() const { return t_; }
  std::size_t batch_size() const { return m_; }
  /// Equivalent passes completed: t m / n.
  double passes_done() const;
  /// Iterations needed for `passes` equivalent passes.
  std::uint64_t iterations_for(double passes) const;

  /// x^(t), materialized in lazy mode.
  std::vector<double> x() const;
  /// x^(t-1).
  std::vector<double> x_prev() const;
  std::span<const double> y() const { return y_; }
  std::span<const double> u() const;

  /// Resets to iteration 0 at (x0, y0), with x^(-1) = x0 and u recomputed.
  void set_point(std::span<const double> x0, std::span<const double> y0);

  /// max_j |u_j - (1/n) sum_i y_i a_ij|.
  double u_drift() const;

  const StepParameters& params() const { return params_; }
  /// Loss / regularizer actually optimized (after perturbation).
  const Loss& loss() const { return loss_; }
  const Regularizer& reg() const { return reg_; }
  const SolverConfig& config() const { return cfg_; }
  const DataSet& data() const { return ds_; }
  const SamplingPlan* plan() const { return plan_ ? &*plan_ : nullptr; }

 private:
  void apply(std::span<const std::size_t> batch, double primal_scale);
  void apply_dense(std::span<const std::size_t> batch, double primal_scale);
  void apply_lazy(std::span<const std::size_t> batch, double primal_scale);
  double row_dot(std::size_t k, std::span<const double> v) const;
  void dual_updates(std::span<const std::size_t> batch, std::span<const double> inner);

  const DataSet& ds_;
  SolverConfig cfg_;
  Loss loss_;
  Regularizer reg_;
  StepParameters params_;
  std::size_t m_;
  std::optional<SamplingPlan> plan_;
  CounterRng rng_;
  std::uint64_t t_ = 0;

  std::vector<double> y_;
  // dense mode
  std::vector<double> x_, x_prev_, xbar_, u_;
  // lazy mode
  LazyCoordState lazy_;

  // scratch
  std::vector<std::size_t> batch_;
  std::vector<double> inner_, dy_, dual_weight_, acc_, x_scratch_, xbar_scratch_;
  std::vector<std::uint64_t> stamp_;
  std::vector<std::uint32_t> touched_;
};

struct TraceOptions {
  const SaddlePoint* reference = nullptr;  // enables dist_x / dist_y
  std::size_t records_per_pass = 1;
  bool wall_time = false;
  /// Report P and D of the perturbed problem instead of the original one.
  bool perturbed_objective = false;
  /// Called after every record with the solver in its current state.
  std::function<void(const SpdcSolver&)> on_record;
};

struct RunResult {
  std::vector<double> x;
  std::vector<double> y;
  ConvergenceTrace trace;
};

/// Runs T = ceil(passes n / m) iterations, recording at t = 0, at every
/// 1/records_per_pass pass boundary and at T.
RunResult run(const DataSet& ds, const Loss& loss, const Regularizer& reg, const SolverConfig& cfg,
              const TraceOptions& opts = {});

}  // namespace spdc
