#pragma once

#include <limits>
#include <string>
#include <string_view>

namespace spdc {

enum class LossKind { squared, smoothed_hinge, logistic, hinge };

LossKind parse_loss_kind(std::string_view name);  // "squared", "smoothed-hinge", "logistic", "hinge"
std::string to_string(LossKind kind);

/// True for the kinds that require labels in {-1, +1}.
bool is_classification(LossKind kind);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval of admissible dual values.
struct Interval {
  double lo;
  double hi;
  bool contains(double v) const { return v >= lo && v <= hi; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
};

// Per-sample scalar loss phi(z) = loss(z; b) and its conjugate phi*(y).
// These free functions are the unperturbed building blocks; `Loss` below adds
// the optional strongly convex perturbation of the conjugate.

double loss_value(LossKind kind, double z, double b);
/// phi'(z). For the hinge loss this is the subgradient -b on bz < 1, else 0.
double loss_derivative(LossKind kind, double z, double b);
/// phi*(y); returns +inf outside the conjugate domain.
double conjugate_value(LossKind kind, double y, double b);
Interval conjugate_domain(LossKind kind, double b);
/// gamma such that phi is (1/gamma)-smooth (0 for the hinge loss).
double smoothness(LossKind kind);
/// Lipschitz constant of phi (+inf for the squared loss).
double lipschitz(LossKind kind);

/// Where the Newton iteration of the logistic dual prox starts.
enum class NewtonStart { lower, upper };

/// argmax_beta { beta * inner - phi*(beta) - (w/2) (beta - y_old)^2 }.
/// y_old is clipped into the conjugate domain first. Requires w > 0 unless the
/// kind is strongly convex in the dual (gamma > 0), in which case w = 0 is
/// also accepted. Throws NumericError if the logistic solve fails.
double dual_prox(LossKind kind, double b, double inner, double y_old, double w,
                 NewtonStart start = NewtonStart::upper);

/// A loss as seen by the solvers: a base kind plus a perturbation delta >= 0
/// that replaces phi* by phi* + (delta/2) y^2 (equivalently smooths phi).
struct Loss {
  LossKind kind = LossKind::squared;
  double delta = 0.0;

  double gamma() const { return smoothness(kind) + delta; }
  double lipschitz() const { return spdc::lipschitz(kind); }
  Interval domain(double b) const { return conjugate_domain(kind, b); }

  /// Value of the (possibly smoothed) primal loss.
  double value(double z, double b) const;
  double derivative(double z, double b) const;
  double conjugate(double y, double b) const;
  /// phi*(y) - phi*(y_ref) evaluated without cancellation for the quadratic kinds.
  double conjugate_difference(double y, double y_ref, double b) const;
  double dual_prox(double b, double inner, double y_old, double w,
                   NewtonStart start = NewtonStart::upper) const;

  Loss unperturbed() const { return {kind, 0.0}; }
};

}  // namespace spdc
