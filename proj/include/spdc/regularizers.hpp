#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace spdc {

enum class RegKind { squared_l2, elastic_net };

/// g(x) = lambda1 ||x||_1 + (lambda2 / 2) ||x||^2. `squared_l2` has lambda1 = 0.
struct Regularizer {
  RegKind kind = RegKind::squared_l2;
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  static Regularizer l2(double lambda) { return {RegKind::squared_l2, 0.0, lambda}; }
  /// Returns squared_l2 when l1 == 0.
  static Regularizer elastic(double l1, double l2);

  /// Strong convexity of g.
  double strong_convexity() const { return lambda2; }

  double value(std::span<const double> x) const;
  /// g*(v) = (1/(2 lambda2)) sum_j max(|v_j| - lambda1, 0)^2; the indicator of
  /// ||v||_inf <= lambda1 when lambda2 = 0.
  double conjugate(std::span<const double> v) const;
  /// Adds delta to lambda2.
  Regularizer perturbed(double delta) const { return {kind, lambda1, lambda2 + delta}; }
};

/// Same as Regularizer::conjugate.
double conjugate_reg_value(const Regularizer& reg, std::span<const double> u);

/// argmin_a { g_j(a) + grad * a + (a - x_old)^2 / (2 tau) }, ties |x_old - tau grad| = tau lambda1 map to 0.
double primal_prox(const Regularizer& reg, double x_old, double grad, double tau);

/// Per-coordinate bookkeeping for delayed primal updates on sparse data.
/// For coordinate j last materialized at iteration L = last_touch[j]:
/// x_at_touch[j] = x_j^(L), x_prev_at_touch[j] = x_j^(L-1), and u_at_touch[j]
/// is the (unchanged since) value of u_j that drives every untouched step.
struct LazyCoordState {
  std::vector<std::uint64_t> last_touch;
  std::vector<double> x_at_touch;
  std::vector<double> x_prev_at_touch;
  std::vector<double> u_at_touch;

  LazyCoordState() = default;
  /// All coordinates touched at iteration 0 with x^(0) = x^(-1) = x0.
  LazyCoordState(std::span<const double> x0, std::span<const double> u0);

  std::size_t size() const { return last_touch.size(); }
  void touch(std::size_t j, std::uint64_t t, double x_new, double x_old, double u) {
    last_touch[j] = t;
    x_at_touch[j] = x_new;
    x_prev_at_touch[j] = x_old;
    u_at_touch[j] = u;
  }
};

/// x_j after `steps` untouched updates x <- (x - tau u) / (1 + lambda tau), lambda > 0.
double l2_advance(double x, double u, double lambda, double tau, std::uint64_t steps);

/// x_j after `steps` untouched elastic-net updates (soft-threshold then shrink),
/// in O(1) via sign-regime closed forms. lambda2 > 0.
double elastic_advance(double x, double u, double lambda1, double lambda2, double tau, std::uint64_t steps);

/// (x_j^(t1), x_j^(t1 - 1)) for squared-l2. Throws std::logic_error if t1 < last_touch.
std::pair<double, double> lazy_catchup_l2(const LazyCoordState& state, std::size_t j, std::uint64_t t1,
                                          double lambda, double tau);

/// (x_j^(t1), x_j^(t1 - 1)) for the elastic net.
std::pair<double, double> lazy_catchup_elastic(const LazyCoordState& state, std::size_t j, std::uint64_t t1,
                                               double lambda1, double lambda2, double tau);

/// Dispatches on the regularizer kind.
std::pair<double, double> lazy_catchup(const Regularizer& reg, const LazyCoordState& state, std::size_t j,
                                       std::uint64_t t1, double tau);

}  // namespace spdc
