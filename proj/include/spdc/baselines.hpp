#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spdc/spdc.hpp"

namespace spdc {

enum class BaselineMethod { sdca, afg };

BaselineMethod parse_baseline_method(std::string_view name);
std::string to_string(BaselineMethod m);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::sdca;
  double passes = 10.0;
  std::uint64_t seed = 1;
  std::optional<double> step;  // AFG step size; default 1 / (R^2/gamma + lambda)
};

/// Stochastic dual coordinate ascent for squared-l2 regularization.
///
/// Keeps u = (1/n) sum_i y_i a_i; the primal point is x = -u / lambda. Every
/// update maximizes D exactly along one coordinate, so D never decreases.
class SdcaSolver {
 public:
  /// Throws ConfigError unless reg is squared-l2 with lambda > 0.
  SdcaSolver(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::uint64_t seed);

  /// Updates a uniformly drawn coordinate.
  void step();
  /// Exact maximization of D over y_i.
  void update(std::size_t i);

  /// Replaces y (clipped into the conjugate domains) and recomputes u.
  void set_dual(std::span<const double> y);

  std::vector<double> x() const;
  std::span<const double> y() const { return y_; }
  std::span<const double> u() const { return u_; }
  std::uint64_t iteration() const { return t_; }

 private:
  const DataSet& ds_;
  Loss loss_;
  double lambda_;
  CounterRng rng_;
  std::uint64_t t_ = 0;
  std::vector<double> y_, u_;
};

/// SDCA run of ceil(passes n) coordinate steps, traced like `run`.
RunResult sdca_run(const DataSet& ds, const Loss& loss, const Regularizer& reg, const BaselineConfig& cfg,
                   const TraceOptions& opts = {});

/// Accelerated proximal gradient on P with constant step 1/L, L = R^2/gamma + lambda2,
/// and momentum (sqrt(L) - sqrt(lambda2)) / (sqrt(L) + sqrt(lambda2)). One
/// iteration is one pass; the traced dual point is y_i = phi_i'(<a_i, x>).
/// Requires gamma > 0 and lambda2 > 0.
RunResult afg_run(const DataSet& ds, const Loss& loss, const Regularizer& reg, const BaselineConfig& cfg,
                  const TraceOptions& opts = {});

/// Dispatches on cfg.method.
RunResult run_baseline(const DataSet& ds, const Loss& loss, const Regularizer& reg, const BaselineConfig& cfg,
                       const TraceOptions& opts = {});

struct ReferenceOptions {
  double tol = 1e-12;
  std::size_t max_newton = 100;
  std::size_t max_passes = 200000;  // SDCA polishing / AFG iterations
  std::size_t newton_max_dim = 2000;
};

/// High-accuracy saddle point with P(x*) - D(y*) <= tol.
///
/// Squared-l2 problems use damped Newton on P (dense Hessian, d <= newton_max_dim)
/// followed by SDCA polishing when needed; the elastic net uses AFG. y* is
/// phi'(A x*) unless the polished dual iterate certifies a smaller gap. Throws
/// NumericError with the achieved gap when tol is not reached.
SaddlePoint reference_solution(const DataSet& ds, const Loss& loss, const Regularizer& reg,
                               const ReferenceOptions& opts = {});

}  // namespace spdc
