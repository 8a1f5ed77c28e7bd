#pragma once

#include <span>
#include <vector>

#include "spdc/dataset.hpp"
#include "spdc/losses.hpp"
#include "spdc/regularizers.hpp"

namespace spdc {

/// u = (1/n) sum_i y_i a_i.
std::vector<double> dual_aggregate(const DataSet& ds, std::span<const double> y);

/// P(x) = (1/n) sum_i phi_i(<a_i, x>) + g(x), compensated over i.
double eval_primal(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::span<const double> x);

/// D(y) = (1/n) sum_i -phi_i*(y_i) - g*(-(1/n) sum_i y_i a_i); -inf if some y_i
/// is outside its conjugate domain.
double eval_dual(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::span<const double> y);

/// f(x, y) = (1/n) sum_i (y_i <a_i, x> - phi_i*(y_i)) + g(x).
double saddle_value(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::span<const double> x,
                    std::span<const double> y);

/// y_i = phi_i'(<a_i, x>): the dual point paired with x by saddle-point stationarity.
std::vector<double> dual_from_primal(const DataSet& ds, const Loss& loss, std::span<const double> x);

/// A saddle point (x*, y*) of f and its value P* = f(x*, y*).
struct SaddlePoint {
  std::vector<double> x;
  std::vector<double> y;
  double primal = 0.0;
  double dual = 0.0;
};

/// f(x, y*) - f(x*, y*), evaluated on x - x* to avoid cancellation.
double primal_saddle_gap(const DataSet& ds, const Regularizer& reg, std::span<const double> x,
                         const SaddlePoint& ref);

/// f(x*, y*) - f(x*, y), evaluated on y - y*.
double dual_saddle_gap(const DataSet& ds, const Loss& loss, std::span<const double> y, const SaddlePoint& ref);

/// Potential used in the mini-batch convergence bound:
///   (1/(2 tau) + lambda/2) ||x - x*||^2 + (1/(4 sigma) + gamma/2) ||y - y*||^2 / m
///   + f(x, y*) - f(x*, y*) + (n/m) (f(x*, y*) - f(x*, y)).
double saddle_potential(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::span<const double> x,
                        std::span<const double> y, const SaddlePoint& ref, double tau, double sigma,
                        std::size_t m);

}  // namespace spdc
