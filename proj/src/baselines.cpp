#include "spdc/baselines.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "spdc/errors.hpp"
#include "spdc/numerics.hpp"

namespace spdc {

BaselineMethod parse_baseline_method(std::string_view name) {
  if (name == "sdca") return BaselineMethod::sdca;
  if (name == "afg") return BaselineMethod::afg;
  throw ConfigError("unknown baseline method '" + std::string(name) + "'");
}

std::string to_string(BaselineMethod m) { return m == BaselineMethod::sdca ? "sdca" : "afg"; }

namespace {

void check_labels(const DataSet& ds, const Loss& loss) {
  if (!is_classification(loss.kind)) return;
  for (double b : ds.labels()) {
    if (b != 1.0 && b != -1.0) throw DataError(to_string(loss.kind) + " loss requires labels in {-1, +1}");
  }
}

double gap_of(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::span<const double> x,
              std::span<const double> y) {
  return eval_primal(ds, loss, reg, x) - eval_dual(ds, loss, reg, y);
}

// phi''(z) of the (possibly perturbed) loss: 1 / (phi*''(beta) + delta) at beta = phi'(z),
// 0 where beta sits on the boundary of the conjugate domain.
double curvature(const Loss& loss, double z, double b) {
  const double beta = loss.derivative(z, b);
  const Interval dom = loss.domain(b);
  double conj2 = 0.0;
  switch (loss.kind) {
    case LossKind::squared: conj2 = 1.0; break;
    case LossKind::smoothed_hinge:
    case LossKind::hinge:
      if (beta <= dom.lo || beta >= dom.hi) return 0.0;
      conj2 = loss.kind == LossKind::smoothed_hinge ? 1.0 : 0.0;
      break;
    case LossKind::logistic: {
      const double p = -b * beta;
      const double v = p * (1.0 - p);
      if (!(v > 0.0)) return 0.0;
      conj2 = 1.0 / v;
      break;
    }
  }
  const double denom = conj2 + loss.delta;
  return denom > 0.0 ? 1.0 / denom : 0.0;
}

// Records at t = 0, whenever floor(t * per / n) increases, and at t = total.
template <class Step, class Record>
void traced_loop(std::uint64_t total, std::uint64_t per, std::uint64_t n, Step&& step, Record&& record) {
  record();
  for (std::uint64_t t = 1; t <= total; ++t) {
    step();
    if ((t * per) / n != ((t - 1) * per) / n || t == total) record();
  }
}

}  // namespace

SdcaSolver::SdcaSolver(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::uint64_t seed)
    : ds_(ds), loss_(loss), lambda_(reg.lambda2), rng_(seed, RngStream::solver) {
  if (reg.kind != RegKind::squared_l2 || reg.lambda1 != 0.0) {
    throw ConfigError("SDCA supports squared-l2 regularization only");
  }
  if (!(lambda_ > 0.0)) throw ConfigError("SDCA requires lambda > 0");
  check_labels(ds, loss);
  y_.assign(ds.n(), 0.0);
  for (std::size_t i = 0; i < ds.n(); ++i) y_[i] = loss_.domain(ds.label(i)).clamp(0.0);
  u_ = dual_aggregate(ds, y_);
}

void SdcaSolver::step() { update(rng_.uniform_index(ds_.n())); }

void SdcaSolver::update(std::size_t i) {
  const double n = static_cast<double>(ds_.n());
  const RowView row = ds_.row(i);
  const double b = ds_.label(i);
  double au = 0.0;
  for (const Entry& e : row) au += e.value * u_[e.index];
  const double inner = -au / lambda_;
  const double w = ds_.row_norm(i) * ds_.row_norm(i) / (lambda_ * n);
  double y_new;
  if (w == 0.0 && !(loss_.gamma() > 0.0)) {
    // Zero row with a linear conjugate: maximize -phi*(beta) over the domain.
    const Interval dom = loss_.domain(b);
    y_new = loss_.conjugate(dom.lo, b) <= loss_.conjugate(dom.hi, b) ? dom.lo : dom.hi;
  } else {
    y_new = loss_.dual_prox(b, inner, y_[i], w);
  }
  const double dy = y_new - y_[i];
  y_[i] = y_new;
  if (dy != 0.0) {
    for (const Entry& e : row) u_[e.index] += dy * e.value / n;
  }
  ++t_;
}

void SdcaSolver::set_dual(std::span<const double> y) {
  if (y.size() != ds_.n()) throw ConfigError("set_dual: dimension mismatch");
  for (std::size_t i = 0; i < y_.size(); ++i) y_[i] = loss_.domain(ds_.label(i)).clamp(y[i]);
  u_ = dual_aggregate(ds_, y_);
}

std::vector<double> SdcaSolver::x() const {
  std::vector<double> x(u_.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = -u_[j] / lambda_;
  return x;
}

RunResult sdca_run(const DataSet& ds, const Loss& loss, const Regularizer& reg, const BaselineConfig& cfg,
                   const TraceOptions& opts) {
  if (!(cfg.passes >= 0.0)) throw ConfigError("passes must be non-negative");
  if (opts.records_per_pass == 0) throw ConfigError("records_per_pass must be >= 1");
  SdcaSolver solver(ds, loss, reg, cfg.seed);
  const auto start = std::chrono::steady_clock::now();
  const double n = static_cast<double>(ds.n());
  RunResult result;
  auto record = [&] {
    const double wall =
        opts.wall_time
            ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()
            : 0.0;
    const std::vector<double> x = solver.x();
    result.trace.records.push_back(make_record(ds, loss, reg, x, solver.y(),
                                               static_cast<double>(solver.iteration()) / n, opts.reference, wall));
  };
  const auto total = static_cast<std::uint64_t>(std::ceil(cfg.passes * n));
  traced_loop(total, opts.records_per_pass, ds.n(), [&] { solver.step(); }, record);
  result.x = solver.x();
  result.y.assign(solver.y().begin(), solver.y().end());
  return result;
}

namespace {

class Afg {
 public:
  Afg(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::optional<double> step)
      : ds_(ds), loss_(loss), reg_(reg) {
    if (!(loss.gamma() > 0.0)) throw ConfigError("AFG requires a smooth loss (gamma > 0)");
    if (!(reg.lambda2 > 0.0)) throw ConfigError("AFG requires lambda2 > 0");
    check_labels(ds, loss);
    double L = ds.max_norm() * ds.max_norm() / loss.gamma() + reg.lambda2;
    if (step) {
      if (!(*step > 0.0)) throw ConfigError("AFG step must be positive");
      L = 1.0 / *step;
    }
    step_ = 1.0 / L;
    const double sl = std::sqrt(L), sm = std::sqrt(reg.lambda2);
    momentum_ = std::max(0.0, (sl - sm) / (sl + sm));
    x_.assign(ds.d(), 0.0);
    x_prev_ = x_;
    v_.resize(ds.d());
    grad_.resize(ds.d());
  }

  void iterate() {
    const double n = static_cast<double>(ds_.n());
    for (std::size_t j = 0; j < x_.size(); ++j) v_[j] = x_[j] + momentum_ * (x_[j] - x_prev_[j]);
    std::fill(grad_.begin(), grad_.end(), 0.0);
    for (std::size_t i = 0; i < ds_.n(); ++i) {
      const double g = loss_.derivative(ds_.dot(i, v_), ds_.label(i)) / n;
      if (g == 0.0) continue;
      for (const Entry& e : ds_.row(i)) grad_[e.index] += g * e.value;
    }
    const double thr = step_ * reg_.lambda1;
    for (std::size_t j = 0; j < x_.size(); ++j) {
      const double w = v_[j] - step_ * (grad_[j] + reg_.lambda2 * v_[j]);
      x_prev_[j] = x_[j];
      x_[j] = w > thr ? w - thr : (w < -thr ? w + thr : 0.0);
    }
  }

  const std::vector<double>& x() const { return x_; }
  std::vector<double> y() const { return dual_from_primal(ds_, loss_, x_); }

 private:
  const DataSet& ds_;
  Loss loss_;
  Regularizer reg_;
  double step_ = 0.0, momentum_ = 0.0;
  std::vector<double> x_, x_prev_, v_, grad_;
};

}  // namespace

RunResult afg_run(const DataSet& ds, const Loss& loss, const Regularizer& reg, const BaselineConfig& cfg,
                  const TraceOptions& opts) {
  if (!(cfg.passes >= 0.0)) throw ConfigError("passes must be non-negative");
  Afg afg(ds, loss, reg, cfg.step);
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  std::uint64_t k = 0;
  auto record = [&] {
    const double wall =
        opts.wall_time
            ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()
            : 0.0;
    const std::vector<double> y = afg.y();
    result.trace.records.push_back(
        make_record(ds, loss, reg, afg.x(), y, static_cast<double>(k), opts.reference, wall));
  };
  const auto total = static_cast<std::uint64_t>(std::ceil(cfg.passes));
  traced_loop(total, 1, 1, [&] { afg.iterate(); ++k; }, record);
  result.x = afg.x();
  result.y = afg.y();
  return result;
}

RunResult run_baseline(const DataSet& ds, const Loss& loss, const Regularizer& reg, const BaselineConfig& cfg,
                       const TraceOptions& opts) {
  return cfg.method == BaselineMethod::sdca ? sdca_run(ds, loss, reg, cfg, opts) : afg_run(ds, loss, reg, cfg, opts);
}

namespace {

struct Candidate {
  std::vector<double> x, y;
  double gap = std::numeric_limits<double>::infinity();
};

void consider(Candidate& best, const DataSet& ds, const Loss& loss, const Regularizer& reg,
              std::vector<double> x, std::vector<double> y) {
  const double g = gap_of(ds, loss, reg, x, y);
  if (g < best.gap || best.x.empty()) {
    best.gap = g;
    best.x = std::move(x);
    best.y = std::move(y);
  }
}

// Damped Newton on P for squared-l2, run until the step is at rounding level so
// that x* is accurate well beyond what the gap certifies.
void newton(const DataSet& ds, const Loss& loss, double lambda, const ReferenceOptions& opts, Candidate& best) {
  const std::size_t n = ds.n(), d = ds.d();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Regularizer reg = Regularizer::l2(lambda);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd grad(d), trial(d);
  Eigen::MatrixXd H(d, d);
  auto span_of = [](const Eigen::VectorXd& v) { return std::span<const double>(v.data(), v.size()); };
  double fx = eval_primal(ds, loss, reg, span_of(x));
  double full_step = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < opts.max_newton; ++it) {
    grad = lambda * x;
    H.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      const double z = ds.dot(i, span_of(x));
      const double g = loss.derivative(z, ds.label(i)) * inv_n;
      const double c = curvature(loss, z, ds.label(i)) * inv_n;
      const RowView row = ds.row(i);
      for (const Entry& e : row) grad[e.index] += g * e.value;
      if (c == 0.0) continue;
      // Upper triangle, filled column by column (H is column-major).
      for (const Entry& p : row) {
        double* col = H.col(p.index).data();
        const double cp = c * p.value;
        for (const Entry& q : row) {
          if (q.index > p.index) break;
          col[q.index] += cp * q.value;
        }
      }
    }
    H.diagonal().array() += lambda;
    const Eigen::VectorXd step = -H.selfadjointView<Eigen::Upper>().ldlt().solve(grad);
    if (!step.allFinite()) break;
    if (step.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>())) break;
    const double slope = grad.dot(step);
    if (std::abs(slope) <= 1e-14 * (1.0 + std::abs(fx))) {
      // The predicted decrease is below the rounding of P, so a line search
      // cannot judge the step. Near x* Newton converges quadratically: keep
      // taking full steps while they keep shrinking.
      const double size = step.lpNorm<Eigen::Infinity>();
      if (!(size < 0.5 * full_step)) break;
      full_step = size;
      x += step;
      fx = eval_primal(ds, loss, reg, span_of(x));
      continue;
    }
    if (!(slope < 0.0)) break;
    double t = 1.0;
    double ft = fx;
    for (int ls = 0; ls < 60; ++ls) {
      trial = x + t * step;
      ft = eval_primal(ds, loss, reg, span_of(trial));
      if (ft <= fx + 1e-4 * t * slope) break;
      t *= 0.5;
    }
    if (!(ft < fx)) break;
    x = trial;
    fx = ft;
  }
  std::vector<double> xv(x.data(), x.data() + d);
  std::vector<double> yv = dual_from_primal(ds, loss, xv);
  consider(best, ds, loss, reg, std::move(xv), std::move(yv));
}

}  // namespace

SaddlePoint reference_solution(const DataSet& ds, const Loss& loss, const Regularizer& reg,
                               const ReferenceOptions& opts) {
  if (!(loss.gamma() > 0.0) || !(reg.lambda2 > 0.0)) {
    throw ConfigError("reference_solution requires gamma > 0 and lambda2 > 0");
  }
  check_labels(ds, loss);
  Candidate best;
  const bool l2 = reg.kind == RegKind::squared_l2 && reg.lambda1 == 0.0;
  if (l2) {
    if (ds.d() <= opts.newton_max_dim) newton(ds, loss, reg.lambda2, opts, best);
    if (!(best.gap <= opts.tol)) {
      SdcaSolver sdca(ds, loss, reg, 0x5dca);
      if (!best.x.empty()) sdca.set_dual(best.y);
      for (std::size_t pass = 0; pass < opts.max_passes && !(best.gap <= opts.tol); ++pass) {
        for (std::size_t i = 0; i < ds.n(); ++i) sdca.update(i);
        std::vector<double> x = sdca.x();
        consider(best, ds, loss, reg, x, std::vector<double>(sdca.y().begin(), sdca.y().end()));
        consider(best, ds, loss, reg, x, dual_from_primal(ds, loss, x));
      }
    }
  } else {
    // Keep iterating past the tolerance until x stops moving, for the same
    // reason as the Newton stopping rule; the settled iterate is returned.
    Afg afg(ds, loss, reg, std::nullopt);
    // Extra iterations are capped at a few times those needed to reach tol.
    std::vector<double> prev;
    std::size_t reached = 0;
    for (std::size_t k = 0; k < opts.max_passes; ++k) {
      afg.iterate();
      if (k % 10 != 9) continue;
      if (best.gap <= opts.tol && reached == 0) reached = k;
      std::vector<double> x = afg.x();
      double scale = 1.0;
      for (double v : x) scale = std::max(scale, 1.0 + std::abs(v));
      const bool settled = (!prev.empty() && max_abs_diff(x, prev) <= 1e-15 * scale) ||
                           (reached > 0 && k > 4 * reached + 100);
      if (settled && best.gap <= opts.tol) {
        Candidate last;
        consider(last, ds, loss, reg, x, afg.y());
        if (last.gap <= opts.tol) best = std::move(last);
        break;
      }
      consider(best, ds, loss, reg, x, afg.y());
      prev = std::move(x);
    }
  }
  if (!(best.gap <= opts.tol)) {
    std::ostringstream msg;
    msg << "reference solve stopped at duality gap " << best.gap << " > tol " << opts.tol;
    throw NumericError(msg.str());
  }
  SaddlePoint sp;
  sp.primal = eval_primal(ds, loss, reg, best.x);
  sp.dual = eval_dual(ds, loss, reg, best.y);
  sp.x = std::move(best.x);
  sp.y = std::move(best.y);
  return sp;
}

}  // namespace spdc
