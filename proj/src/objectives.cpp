#include "spdc/objectives.hpp"

#include <cmath>

#include "spdc/numerics.hpp"

namespace spdc {

std::vector<double> dual_aggregate(const DataSet& ds, std::span<const double> y) {
  std::vector<double> u(ds.d(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (y[i] == 0.0) continue;
    for (const Entry& e : ds.row(i)) u[e.index] += y[i] * e.value;
  }
  for (double& v : u) v *= inv_n;
  return u;
}

double eval_primal(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::span<const double> x) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < ds.n(); ++i) sum.add(loss.value(ds.dot(i, x), ds.label(i)));
  return sum.value() / static_cast<double>(ds.n()) + reg.value(x);
}

double eval_dual(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::span<const double> y) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double c = loss.conjugate(y[i], ds.label(i));
    if (!std::isfinite(c)) return -kInf;
    sum.add(-c);
  }
  std::vector<double> u = dual_aggregate(ds, y);
  for (double& v : u) v = -v;
  return sum.value() / static_cast<double>(ds.n()) - reg.conjugate(u);
}

double saddle_value(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::span<const double> x,
                    std::span<const double> y) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    sum.add(y[i] * ds.dot(i, x) - loss.conjugate(y[i], ds.label(i)));
  }
  return sum.value() / static_cast<double>(ds.n()) + reg.value(x);
}

std::vector<double> dual_from_primal(const DataSet& ds, const Loss& loss, std::span<const double> x) {
  std::vector<double> y(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) y[i] = loss.derivative(ds.dot(i, x), ds.label(i));
  return y;
}

double primal_saddle_gap(const DataSet& ds, const Regularizer& reg, std::span<const double> x,
                         const SaddlePoint& ref) {
  // <u*, e> + g(x) - g(x*) with e = x - x*.
  const std::vector<double> u_star = dual_aggregate(ds, ref.y);
  const double l1 = reg.kind == RegKind::elastic_net ? reg.lambda1 : 0.0;
  CompensatedSum sum;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double e = x[j] - ref.x[j];
    sum.add(e * (u_star[j] + 0.5 * reg.lambda2 * (x[j] + ref.x[j])));
    if (l1 != 0.0) sum.add(l1 * (std::abs(x[j]) - std::abs(ref.x[j])));
  }
  return sum.value();
}

double dual_saddle_gap(const DataSet& ds, const Loss& loss, std::span<const double> y, const SaddlePoint& ref) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double z = ds.dot(i, ref.x);
    sum.add((ref.y[i] - y[i]) * z + loss.conjugate_difference(y[i], ref.y[i], ds.label(i)));
  }
  return sum.value() / static_cast<double>(ds.n());
}

double saddle_potential(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::span<const double> x,
                        std::span<const double> y, const SaddlePoint& ref, double tau, double sigma,
                        std::size_t m) {
  const double mm = static_cast<double>(m);
  const double n = static_cast<double>(ds.n());
  return (0.5 / tau + 0.5 * reg.strong_convexity()) * squared_distance(x, ref.x) +
         (0.25 / sigma + 0.5 * loss.gamma()) * squared_distance(y, ref.y) / mm + primal_saddle_gap(ds, reg, x, ref) +
         (n / mm) * dual_saddle_gap(ds, loss, y, ref);
}

}  // namespace spdc
