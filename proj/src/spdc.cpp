#include "spdc/spdc.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>

#include "spdc/errors.hpp"
#include "spdc/numerics.hpp"

namespace spdc {

Variant parse_variant(std::string_view name) {
  if (name == "basic") return Variant::basic;
  if (name == "minibatch" || name == "mini-batch") return Variant::minibatch;
  if (name == "weighted") return Variant::weighted;
  throw ConfigError("unknown SPDC variant '" + std::string(name) + "'");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::basic: return "basic";
    case Variant::minibatch: return "minibatch";
    case Variant::weighted: return "weighted";
  }
  return "?";
}

StepParameters compute_parameters(std::size_t n, std::size_t m, double R, double lambda, double gamma) {
  if (n == 0 || m == 0 || m > n) throw ConfigError("batch size must be in [1, n]");
  if (!(R > 0.0) || !(lambda > 0.0) || !(gamma > 0.0)) {
    throw ConfigError("compute_parameters requires positive R, lambda and gamma");
  }
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  StepParameters p;
  p.tau = std::sqrt(mm * gamma / (nn * lambda)) / R;
  p.sigma = std::sqrt(nn * lambda / (mm * gamma)) / R;
  p.theta = 1.0 - 1.0 / (nn / mm + R * std::sqrt(nn / (mm * lambda * gamma)));
  return p;
}

StepParameters compute_weighted_parameters(std::size_t n, double mean_norm, double lambda, double gamma,
                                           double alpha) {
  if (n == 0) throw ConfigError("empty data set");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
  if (!(mean_norm > 0.0) || !(lambda > 0.0) || !(gamma > 0.0)) {
    throw ConfigError("compute_weighted_parameters requires positive mean norm, lambda and gamma");
  }
  const double nn = static_cast<double>(n);
  const double scale = alpha / (2.0 * mean_norm);
  StepParameters p;
  p.tau = scale * std::sqrt(gamma / (nn * lambda));
  p.sigma = scale * std::sqrt(nn * lambda / gamma);
  p.theta = 1.0 - 1.0 / (nn / (1.0 - alpha) + (mean_norm / alpha) * std::sqrt(nn / (lambda * gamma)));
  return p;
}

double optimal_alpha(std::size_t n, double kappa_bar) {
  if (n == 0 || !(kappa_bar > 0.0)) throw ConfigError("optimal_alpha requires n, kappa_bar > 0");
  return 1.0 / (1.0 + std::pow(static_cast<double>(n) / kappa_bar, 0.25));
}

PerturbedPair perturb(const Loss& loss, const Regularizer& reg, double delta) {
  if (!(delta > 0.0)) throw ConfigError("perturbation delta must be positive");
  return {Loss{loss.kind, loss.delta + delta}, reg.perturbed(delta)};
}

SpdcSolver::SpdcSolver(const DataSet& ds, const Loss& loss, const Regularizer& reg, const SolverConfig& cfg)
    : ds_(ds), cfg_(cfg), loss_(loss), reg_(reg), m_(cfg.batch_size), rng_(cfg.seed, RngStream::solver) {
  const std::size_t n = ds.n();
  if (cfg.variant != Variant::minibatch && m_ != 1) {
    throw ConfigError("batch size must be 1 for the " + to_string(cfg.variant) + " variant");
  }
  if (m_ == 0 || m_ > n) throw ConfigError("batch size must be in [1, n]");
  if (!(cfg.passes >= 0.0)) throw ConfigError("passes must be non-negative");
  if (cfg.delta < 0.0) throw ConfigError("delta must be non-negative");
  if (is_classification(loss.kind)) {
    for (double b : ds.labels()) {
      if (b != 1.0 && b != -1.0) throw DataError(to_string(loss.kind) + " loss requires labels in {-1, +1}");
    }
  }
  if (cfg.delta > 0.0) {
    auto p = perturb(loss, reg, cfg.delta);
    loss_ = p.loss;
    reg_ = p.reg;
  }
  if (!(loss_.gamma() > 0.0)) {
    throw ConfigError(to_string(loss.kind) + " loss is not smooth; set a perturbation delta > 0");
  }
  if (!(reg_.lambda2 > 0.0)) {
    throw ConfigError("regularizer is not strongly convex; set lambda > 0 or a perturbation delta > 0");
  }

  const double lambda = reg_.strong_convexity();
  const double gamma = loss_.gamma();
  if (cfg.variant == Variant::weighted) {
    if (!(ds.mean_norm() > 0.0)) throw DataError("all feature rows are zero");
    const double alpha =
        cfg.alpha ? *cfg.alpha : optimal_alpha(n, ds.mean_norm() * ds.mean_norm() / (lambda * gamma));
    plan_.emplace(ds, alpha);
    params_ = compute_weighted_parameters(n, ds.mean_norm(), lambda, gamma, alpha);
  } else {
    if (!(ds.max_norm() > 0.0)) throw DataError("all feature rows are zero");
    params_ = compute_parameters(n, m_, ds.max_norm(), lambda, gamma);
  }
  if (cfg.params) {
    const StepParameters& p = *cfg.params;
    if (!(p.tau > 0.0) || !(p.sigma > 0.0) || !(p.theta > 0.0 && p.theta < 1.0)) {
      throw ConfigError("step parameters need tau, sigma > 0 and theta in (0, 1)");
    }
    params_ = p;
  }

  const std::size_t d = ds.d();
  y_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) y_[i] = loss_.domain(ds.label(i)).clamp(0.0);
  const std::vector<double> u0 = dual_aggregate(ds, y_);
  const std::vector<double> x0(d, 0.0);
  if (cfg.lazy) {
    lazy_ = LazyCoordState(x0, u0);
  } else {
    x_ = x0;
    x_prev_ = x0;
    xbar_ = x0;
    u_ = u0;
  }
  acc_.assign(d, 0.0);
  stamp_.assign(d, 0);
  if (cfg.lazy) {
    x_scratch_.assign(d, 0.0);
    xbar_scratch_.assign(d, 0.0);
  }
}

double SpdcSolver::passes_done() const {
  return static_cast<double>(t_) * static_cast<double>(m_) / static_cast<double>(ds_.n());
}

std::uint64_t SpdcSolver::iterations_for(double passes) const {
  return static_cast<std::uint64_t>(
      std::ceil(passes * static_cast<double>(ds_.n()) / static_cast<double>(m_)));
}

void SpdcSolver::step() {
  switch (cfg_.variant) {
    case Variant::basic: step_basic(); break;
    case Variant::minibatch: step_minibatch(); break;
    case Variant::weighted: step_weighted(); break;
  }
}

void SpdcSolver::step_basic() {
  batch_.assign(1, rng_.uniform_index(ds_.n()));
  dual_weight_.assign(1, 1.0 / params_.sigma);
  apply(batch_, 1.0);
}

void SpdcSolver::step_minibatch() {
  sample_subset(rng_, ds_.n(), m_, batch_);
  dual_weight_.assign(batch_.size(), 1.0 / params_.sigma);
  apply(batch_, 1.0 / static_cast<double>(m_));
}

void SpdcSolver::step_weighted() {
  if (!plan_) throw ConfigError("weighted step requires the weighted variant");
  const std::size_t k = plan_->draw(rng_);
  const double pn = plan_->probability(k) * static_cast<double>(ds_.n());
  batch_.assign(1, k);
  dual_weight_.assign(1, pn / params_.sigma);
  apply(batch_, 1.0 / pn);
}

double SpdcSolver::row_dot(std::size_t k, std::span<const double> v) const {
  const RowView row = ds_.row(k);
  if (row.size() > 10000) {
    CompensatedSum s;
    for (const Entry& e : row) s.add(e.value * v[e.index]);
    return s.value();
  }
  double s = 0.0;
  for (const Entry& e : row) s += e.value * v[e.index];
  return s;
}

void SpdcSolver::dual_updates(std::span<const std::size_t> batch, std::span<const double> inner) {
  dy_.resize(batch.size());
  for (std::size_t p = 0; p < batch.size(); ++p) {
    const std::size_t k = batch[p];
    const double y_new = loss_.dual_prox(ds_.label(k), inner[p], y_[k], dual_weight_[p]);
    dy_[p] = y_new - y_[k];
    y_[k] = y_new;
  }
}

void SpdcSolver::apply(std::span<const std::size_t> batch, double primal_scale) {
  if (cfg_.lazy) {
    apply_lazy(batch, primal_scale);
  } else {
    apply_dense(batch, primal_scale);
  }
  ++t_;
}

void SpdcSolver::apply_dense(std::span<const std::size_t> batch, double primal_scale) {
  const std::uint64_t mark = t_ + 1;
  const double n = static_cast<double>(ds_.n());
  inner_.resize(batch.size());
  for (std::size_t p = 0; p < batch.size(); ++p) inner_[p] = row_dot(batch[p], xbar_);
  dual_updates(batch, inner_);

  // acc = sum_{k in K} (y_k^new - y_k^old) a_k, accumulated in ascending k.
  touched_.clear();
  for (std::size_t p = 0; p < batch.size(); ++p) {
    for (const Entry& e : ds_.row(batch[p])) {
      if (stamp_[e.index] != mark) {
        stamp_[e.index] = mark;
        touched_.push_back(e.index);
      }
      acc_[e.index] += dy_[p] * e.value;
    }
  }

  const double tau = params_.tau, theta = params_.theta;
  for (std::size_t j = 0; j < x_.size(); ++j) {
    const double grad = stamp_[j] == mark ? u_[j] + primal_scale * acc_[j] : u_[j];
    const double x_new = primal_prox(reg_, x_[j], grad, tau);
    xbar_[j] = x_new + theta * (x_new - x_[j]);
    x_prev_[j] = x_[j];
    x_[j] = x_new;
  }
  for (std::uint32_t j : touched_) {
    u_[j] += acc_[j] / n;
    acc_[j] = 0.0;
  }
}

void SpdcSolver::apply_lazy(std::span<const std::size_t> batch, double primal_scale) {
  const std::uint64_t mark = t_ + 1;
  const double n = static_cast<double>(ds_.n());
  const double tau = params_.tau, theta = params_.theta;

  // Materialize x^(t) and x-bar^(t) on the union of the batch supports.
  touched_.clear();
  for (std::size_t k : batch) {
    for (const Entry& e : ds_.row(k)) {
      const std::uint32_t j = e.index;
      if (stamp_[j] == mark) continue;
      stamp_[j] = mark;
      touched_.push_back(j);
      const auto [xt, xprev] = lazy_catchup(reg_, lazy_, j, t_, tau);
      x_scratch_[j] = xt;
      xbar_scratch_[j] = xt + theta * (xt - xprev);
    }
  }

  inner_.resize(batch.size());
  for (std::size_t p = 0; p < batch.size(); ++p) inner_[p] = row_dot(batch[p], xbar_scratch_);
  dual_updates(batch, inner_);

  for (std::size_t p = 0; p < batch.size(); ++p) {
    for (const Entry& e : ds_.row(batch[p])) acc_[e.index] += dy_[p] * e.value;
  }
  for (std::uint32_t j : touched_) {
    const double u_old = lazy_.u_at_touch[j];
    const double x_new = primal_prox(reg_, x_scratch_[j], u_old + primal_scale * acc_[j], tau);
    lazy_.touch(j, mark, x_new, x_scratch_[j], u_old + acc_[j] / n);
    acc_[j] = 0.0;
  }
}

std::vector<double> SpdcSolver::x() const {
  if (!cfg_.lazy) return x_;
  std::vector<double> out(ds_.d());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = lazy_catchup(reg_, lazy_, j, t_, params_.tau).first;
  return out;
}

std::vector<double> SpdcSolver::x_prev() const {
  if (!cfg_.lazy) return x_prev_;
  std::vector<double> out(ds_.d());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = lazy_catchup(reg_, lazy_, j, t_, params_.tau).second;
  return out;
}

std::span<const double> SpdcSolver::u() const { return cfg_.lazy ? lazy_.u_at_touch : u_; }

void SpdcSolver::set_point(std::span<const double> x0, std::span<const double> y0) {
  if (x0.size() != ds_.d() || y0.size() != ds_.n()) throw ConfigError("set_point: dimension mismatch");
  for (std::size_t i = 0; i < y_.size(); ++i) y_[i] = loss_.domain(ds_.label(i)).clamp(y0[i]);
  const std::vector<double> u0 = dual_aggregate(ds_, y_);
  t_ = 0;
  std::fill(stamp_.begin(), stamp_.end(), 0);
  if (cfg_.lazy) {
    lazy_ = LazyCoordState(x0, u0);
  } else {
    x_.assign(x0.begin(), x0.end());
    x_prev_ = x_;
    xbar_ = x_;
    u_ = u0;
  }
}

double SpdcSolver::u_drift() const { return max_abs_diff(u(), dual_aggregate(ds_, y_)); }

RunResult run(const DataSet& ds, const Loss& loss, const Regularizer& reg, const SolverConfig& cfg,
              const TraceOptions& opts) {
  if (opts.records_per_pass == 0) throw ConfigError("records_per_pass must be >= 1");
  SpdcSolver solver(ds, loss, reg, cfg);
  const Loss& report_loss = opts.perturbed_objective ? solver.loss() : loss;
  const Regularizer& report_reg = opts.perturbed_objective ? solver.reg() : reg;
  const auto start = std::chrono::steady_clock::now();

  RunResult result;
  auto record = [&] {
    const double wall =
        opts.wall_time
            ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()
            : 0.0;
    const std::vector<double> x = solver.x();
    result.trace.records.push_back(
        make_record(ds, report_loss, report_reg, x, solver.y(), solver.passes_done(), opts.reference, wall));
    assert(solver.u_drift() <= 1e-9 * (1.0 + max_abs_diff(solver.u(), std::vector<double>(ds.d(), 0.0))));
    if (opts.on_record) opts.on_record(solver);
  };

  record();
  const std::uint64_t total = solver.iterations_for(cfg.passes);
  const std::uint64_t per = static_cast<std::uint64_t>(solver.batch_size()) * opts.records_per_pass;
  const std::uint64_t n = ds.n();
  for (std::uint64_t t = 1; t <= total; ++t) {
    solver.step();
    if ((t * per) / n != ((t - 1) * per) / n || t == total) record();
  }
  result.x = solver.x();
  result.y.assign(solver.y().begin(), solver.y().end());
  return result;
}

}  // namespace spdc
