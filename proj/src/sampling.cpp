#include "spdc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "spdc/dataset.hpp"
#include "spdc/errors.hpp"

namespace spdc {

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw ConfigError("alias table needs at least one weight");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("alias weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw ConfigError("alias weights sum to zero");

  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (std::uint32_t l : large) {
    prob_[l] = 1.0;
    alias_[l] = l;
  }
  for (std::uint32_t s : small) {
    prob_[s] = 1.0;
    alias_[s] = s;
  }
}

std::size_t AliasTable::draw(CounterRng& rng) const {
  const std::size_t col = rng.uniform_index(prob_.size());
  return rng.uniform01() < prob_[col] ? col : alias_[col];
}

SamplingPlan::SamplingPlan(const DataSet& ds, double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
  const std::size_t n = ds.n();
  const double total = ds.mean_norm() * static_cast<double>(n);
  p_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double uniform = 1.0 / static_cast<double>(n);
    p_[k] = total > 0.0 ? (1.0 - alpha) * uniform + alpha * ds.row_norm(k) / total : uniform;
  }
  table_ = AliasTable(p_);
}

void sample_subset(CounterRng& rng, std::size_t n, std::size_t m, std::vector<std::size_t>& out) {
  if (m == 0 || m > n) throw ConfigError("subset size must be in [1, n]");
  out.clear();
  if (m == n) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return;
  }
  if (m == 1) {
    out.push_back(rng.uniform_index(n));
    return;
  }
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(2 * m);
  for (std::size_t j = n - m; j < n; ++j) {
    const std::size_t t = rng.uniform_index(j + 1);
    const std::size_t pick = chosen.count(t) ? j : t;
    chosen.insert(pick);
    out.push_back(pick);
  }
  std::sort(out.begin(), out.end());
}

}  // namespace spdc
