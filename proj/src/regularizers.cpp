#include "spdc/regularizers.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

#include "spdc/errors.hpp"
#include "spdc/losses.hpp"

namespace spdc {

Regularizer Regularizer::elastic(double l1, double l2) {
  if (l1 < 0.0 || l2 < 0.0) throw ConfigError("regularization coefficients must be non-negative");
  return l1 == 0.0 ? Regularizer{RegKind::squared_l2, 0.0, l2} : Regularizer{RegKind::elastic_net, l1, l2};
}

double Regularizer::value(std::span<const double> x) const {
  double l1 = 0.0, sq = 0.0;
  for (double v : x) {
    l1 += std::abs(v);
    sq += v * v;
  }
  return (kind == RegKind::elastic_net ? lambda1 * l1 : 0.0) + 0.5 * lambda2 * sq;
}

double Regularizer::conjugate(std::span<const double> v) const {
  const double l1 = kind == RegKind::elastic_net ? lambda1 : 0.0;
  double s = 0.0;
  for (double vj : v) {
    const double excess = std::abs(vj) - l1;
    if (excess > 0.0) {
      if (lambda2 == 0.0) return kInf;
      s += excess * excess;
    }
  }
  return lambda2 == 0.0 ? 0.0 : s / (2.0 * lambda2);
}

double conjugate_reg_value(const Regularizer& reg, std::span<const double> u) { return reg.conjugate(u); }

double primal_prox(const Regularizer& reg, double x_old, double grad, double tau) {
  const double v = x_old - tau * grad;
  const double q = 1.0 + reg.lambda2 * tau;
  if (reg.kind == RegKind::squared_l2) return v / q;
  const double thr = tau * reg.lambda1;
  if (v > thr) return (v - thr) / q;
  if (v < -thr) return (v + thr) / q;
  return 0.0;
}

LazyCoordState::LazyCoordState(std::span<const double> x0, std::span<const double> u0)
    : last_touch(x0.size(), 0),
      x_at_touch(x0.begin(), x0.end()),
      x_prev_at_touch(x0.begin(), x0.end()),
      u_at_touch(u0.begin(), u0.end()) {}

namespace {

// One untouched step scales x toward the fixed point c of x <- (x + c (q - 1)) / q.
// After s steps: x q^-s + c (1 - q^-s), with both factors taken from log1p/expm1
// so no cancellation appears when (q - 1) s is small. q - 1 is computed exactly
// from the same rounded q the step-by-step update divides by.
struct Geometric {
  double q, qm1, log_q;

  Geometric(double lambda, double tau) : q(1.0 + lambda * tau), qm1(q - 1.0), log_q(std::log1p(qm1)) {
    if (!(qm1 > 0.0)) throw ConfigError("lazy catch-up requires lambda * tau > 0");
  }

  double advance(double x0, double c, std::uint64_t s) const {
    if (s == 0) return x0;
    const double a = -static_cast<double>(s) * log_q;
    return x0 * std::exp(a) - c * std::expm1(a);
  }
};

}  // namespace

double l2_advance(double x, double u, double lambda, double tau, std::uint64_t steps) {
  if (steps == 0) return x;
  const Geometric geo(lambda, tau);
  return geo.advance(x, -tau * u / geo.qm1, steps);
}

double elastic_advance(double x, double u, double lambda1, double lambda2, double tau, std::uint64_t steps) {
  if (steps == 0) return x;
  const Geometric geo(lambda2, tau);
  const double thr = tau * lambda1;
  const double c_pos = -tau * (u + lambda1) / geo.qm1;  // fixed point of the x > 0 branch
  const double c_neg = -tau * (u - lambda1) / geo.qm1;  // fixed point of the x < 0 branch
  auto step = [&](double xv) {
    const double v = xv - tau * u;
    if (v > thr) return (v - thr) / geo.q;
    if (v < -thr) return (v + thr) / geo.q;
    return 0.0;
  };
  // Largest s in [0, steps] with every one of the first s steps on the branch
  // whose fixed point is c, i.e. sign(advance(x, c, i)) == sign for i <= s.
  auto regime_length = [&](double x0, double c, double sign, double log_arg) {
    const double bound = std::log1p(log_arg) / geo.log_q;  // s < bound
    std::uint64_t s = 0;
    if (!(bound < static_cast<double>(steps))) {
      s = steps;
    } else if (bound > 0.0) {
      s = static_cast<std::uint64_t>(std::ceil(bound)) - 1;
    }
    while (s > 0 && !(sign * geo.advance(x0, c, s) > 0.0)) --s;
    while (s < steps && sign * geo.advance(x0, c, s + 1) > 0.0) ++s;
    return s;
  };

  [[maybe_unused]] int phases = 0;
  while (steps > 0) {
    assert(++phases <= 3 && "iterates are monotone; each regime is entered at most once");
    if (x == 0.0) {
      const double v = -(tau * u);
      if (v > thr) return geo.advance(0.0, c_pos, steps);
      if (v < -thr) return geo.advance(0.0, c_neg, steps);
      return 0.0;
    }
    if (x > 0.0) {
      if (u + lambda1 <= 0.0) return geo.advance(x, c_pos, steps);
      const std::uint64_t s = regime_length(x, c_pos, 1.0, geo.qm1 * x / (tau * (u + lambda1)));
      if (s == steps) return geo.advance(x, c_pos, steps);
      x = step(geo.advance(x, c_pos, s));
      steps -= s + 1;
    } else {
      if (u - lambda1 >= 0.0) return geo.advance(x, c_neg, steps);
      const std::uint64_t s = regime_length(x, c_neg, -1.0, geo.qm1 * x / (tau * (u - lambda1)));
      if (s == steps) return geo.advance(x, c_neg, steps);
      x = step(geo.advance(x, c_neg, s));
      steps -= s + 1;
    }
  }
  return x;
}

namespace {

template <class Advance>
std::pair<double, double> catchup(const LazyCoordState& state, std::size_t j, std::uint64_t t1, Advance advance) {
  const std::uint64_t last = state.last_touch[j];
  if (t1 < last) {
    throw std::logic_error("lazy catch-up to iteration " + std::to_string(t1) + " before last touch " +
                           std::to_string(last));
  }
  const std::uint64_t gap = t1 - last;
  const double x = state.x_at_touch[j];
  if (gap == 0) return {x, state.x_prev_at_touch[j]};
  const double u = state.u_at_touch[j];
  return {advance(x, u, gap), gap == 1 ? x : advance(x, u, gap - 1)};
}

}  // namespace

std::pair<double, double> lazy_catchup_l2(const LazyCoordState& state, std::size_t j, std::uint64_t t1,
                                          double lambda, double tau) {
  return catchup(state, j, t1,
                 [&](double x, double u, std::uint64_t s) { return l2_advance(x, u, lambda, tau, s); });
}

std::pair<double, double> lazy_catchup_elastic(const LazyCoordState& state, std::size_t j, std::uint64_t t1,
                                               double lambda1, double lambda2, double tau) {
  return catchup(state, j, t1, [&](double x, double u, std::uint64_t s) {
    return elastic_advance(x, u, lambda1, lambda2, tau, s);
  });
}

std::pair<double, double> lazy_catchup(const Regularizer& reg, const LazyCoordState& state, std::size_t j,
                                       std::uint64_t t1, double tau) {
  if (reg.kind == RegKind::squared_l2) return lazy_catchup_l2(state, j, t1, reg.lambda2, tau);
  return lazy_catchup_elastic(state, j, t1, reg.lambda1, reg.lambda2, tau);
}

}  // namespace spdc
