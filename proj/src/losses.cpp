#include "spdc/losses.hpp"

#include <algorithm>
#include <cmath>

#include "spdc/errors.hpp"

namespace spdc {

LossKind parse_loss_kind(std::string_view name) {
  if (name == "squared") return LossKind::squared;
  if (name == "smoothed-hinge" || name == "smoothed_hinge") return LossKind::smoothed_hinge;
  if (name == "logistic") return LossKind::logistic;
  if (name == "hinge") return LossKind::hinge;
  throw ConfigError("unknown loss '" + std::string(name) + "'");
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::squared: return "squared";
    case LossKind::smoothed_hinge: return "smoothed-hinge";
    case LossKind::logistic: return "logistic";
    case LossKind::hinge: return "hinge";
  }
  return "?";
}

bool is_classification(LossKind kind) { return kind != LossKind::squared; }

namespace {

void check_label(LossKind kind, double b) {
  if (is_classification(kind) && b != 1.0 && b != -1.0) {
    throw DataError(to_string(kind) + " loss requires labels in {-1, +1}, got " + std::to_string(b));
  }
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

// Logistic dual prox. Writing s = b*beta = -p with p = sigmoid(v) in (0, 1),
// stationarity of the strongly concave objective becomes
//   G(v) = v + w p(v) + b*inner + w s0 = 0,   G'(v) = 1 + w p (1 - p) >= 1,
// which is monotone with the root bracketed in [hi - w, hi], hi = -b*inner - w s0.
// G equals b times the derivative of the objective in beta, and G' >= 1 gives
// |v - v*| <= |G(v)|.
double logistic_dual_prox(double b, double inner, double s0, double w, NewtonStart start) {
  const double c = b * inner;
  double hi = -c - w * s0;
  double lo = hi - w;
  const double tol = 1e-12 * (1.0 + std::abs(inner));
  double v = start == NewtonStart::lower ? lo : hi;
  double last_step = w, step_before_last = w;
  for (int iter = 0; iter < 200; ++iter) {
    const double p = sigmoid(v);
    const double g = v + w * p + c + w * s0;
    if (!std::isfinite(g)) break;
    const double width_tol = 1e-15 * (1.0 + std::abs(v));
    if (std::abs(g) <= tol || hi - lo <= width_tol || 2.0 * std::abs(g) <= width_tol) {
      return b * (-p);
    }
    // G' >= 1 also confines the root to within |g| of v.
    if (g < 0.0) {
      lo = v;
      hi = std::min(hi, v - g);
    } else {
      hi = v;
      lo = std::max(lo, v - g);
    }
    const double slope = 1.0 + w * p * (1.0 - p);
    const double next = v - g / slope;
    // Bisect when Newton leaves the bracket or fails to halve the step before last.
    if (!(next > lo && next < hi) || 2.0 * std::abs(g) > std::abs(step_before_last * slope)) {
      step_before_last = last_step;
      last_step = 0.5 * (hi - lo);
      v = lo + last_step;
    } else {
      step_before_last = last_step;
      last_step = g / slope;
      v = next;
    }
  }
  throw NumericError("logistic dual prox did not converge");
}

}  // namespace

double loss_value(LossKind kind, double z, double b) {
  check_label(kind, b);
  const double bz = b * z;
  switch (kind) {
    case LossKind::squared: return 0.5 * (z - b) * (z - b);
    case LossKind::hinge: return std::max(0.0, 1.0 - bz);
    case LossKind::logistic: return std::log1p(std::exp(-std::abs(bz))) + std::max(0.0, -bz);
    case LossKind::smoothed_hinge:
      if (bz >= 1.0) return 0.0;
      if (bz <= 0.0) return 0.5 - bz;
      return 0.5 * (1.0 - bz) * (1.0 - bz);
  }
  return 0.0;
}

double loss_derivative(LossKind kind, double z, double b) {
  check_label(kind, b);
  const double bz = b * z;
  switch (kind) {
    case LossKind::squared: return z - b;
    case LossKind::hinge: return bz < 1.0 ? -b : 0.0;
    case LossKind::logistic: return -b * sigmoid(-bz);
    case LossKind::smoothed_hinge:
      if (bz >= 1.0) return 0.0;
      if (bz <= 0.0) return -b;
      return -b * (1.0 - bz);
  }
  return 0.0;
}

Interval conjugate_domain(LossKind kind, double b) {
  if (kind == LossKind::squared) return {-kInf, kInf};
  // b * y in [-1, 0]
  return b > 0.0 ? Interval{-1.0, 0.0} : Interval{0.0, 1.0};
}

double conjugate_value(LossKind kind, double y, double b) {
  if (kind == LossKind::squared) return y * b + 0.5 * y * y;
  const double s = b * y;
  if (!(s >= -1.0 && s <= 0.0)) return kInf;
  switch (kind) {
    case LossKind::smoothed_hinge: return s + 0.5 * y * y;
    case LossKind::hinge: return s;
    case LossKind::logistic: return xlogx(-s) + xlogx(1.0 + s);
    default: return kInf;
  }
}

double smoothness(LossKind kind) {
  switch (kind) {
    case LossKind::squared: return 1.0;
    case LossKind::smoothed_hinge: return 1.0;
    case LossKind::logistic: return 4.0;
    case LossKind::hinge: return 0.0;
  }
  return 0.0;
}

double lipschitz(LossKind kind) { return kind == LossKind::squared ? kInf : 1.0; }

double dual_prox(LossKind kind, double b, double inner, double y_old, double w, NewtonStart start) {
  if (!(w > 0.0) && !(w == 0.0 && smoothness(kind) > 0.0)) {
    throw ConfigError("dual prox weight must be positive");
  }
  check_label(kind, b);
  const Interval dom = conjugate_domain(kind, b);
  y_old = dom.clamp(y_old);
  switch (kind) {
    case LossKind::squared: return (inner - b + w * y_old) / (1.0 + w);
    case LossKind::smoothed_hinge: return dom.clamp((inner - b + w * y_old) / (1.0 + w));
    case LossKind::hinge: return dom.clamp(y_old + (inner - b) / w);
    case LossKind::logistic: return logistic_dual_prox(b, inner, b * y_old, w, start);
  }
  return y_old;
}

double Loss::value(double z, double b) const {
  if (delta == 0.0) return loss_value(kind, z, b);
  check_label(kind, b);
  // Moreau-type smoothing: sup_beta { beta z - phi*(beta) - (delta/2) beta^2 }.
  const double beta = spdc::dual_prox(kind, b, z, 0.0, delta);
  return z * beta - conjugate_value(kind, beta, b) - 0.5 * delta * beta * beta;
}

double Loss::derivative(double z, double b) const {
  if (delta == 0.0) return loss_derivative(kind, z, b);
  check_label(kind, b);
  return spdc::dual_prox(kind, b, z, 0.0, delta);
}

double Loss::conjugate(double y, double b) const {
  const double base = conjugate_value(kind, y, b);
  return delta == 0.0 ? base : base + 0.5 * delta * y * y;
}

double Loss::conjugate_difference(double y, double y_ref, double b) const {
  const Interval dom = domain(b);
  if (!dom.contains(y) || !dom.contains(y_ref)) return conjugate(y, b) - conjugate(y_ref, b);
  const double dy = y - y_ref;
  double diff = 0.0;
  switch (kind) {
    case LossKind::squared:
    case LossKind::smoothed_hinge: diff = dy * (b + 0.5 * (y + y_ref)); break;
    case LossKind::hinge: diff = b * dy; break;
    case LossKind::logistic: diff = conjugate_value(kind, y, b) - conjugate_value(kind, y_ref, b); break;
  }
  return diff + 0.5 * delta * dy * (y + y_ref);
}

double Loss::dual_prox(double b, double inner, double y_old, double w, NewtonStart start) const {
  if (delta == 0.0) return spdc::dual_prox(kind, b, inner, y_old, w, start);
  // (delta/2) beta^2 + (w/2)(beta - y_old)^2 = ((w + delta)/2)(beta - w y_old / (w + delta))^2 + const
  const double wt = w + delta;
  const double center = conjugate_domain(kind, b).clamp(y_old) * (w / wt);
  return spdc::dual_prox(kind, b, inner, center, wt, start);
}

}  // namespace spdc
