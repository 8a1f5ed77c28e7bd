#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spdc/rng.hpp"

namespace spdc {

class DataSet;

/// Walker/Vose alias table: O(n) build, O(1) draws (two generator outputs per draw).
class AliasTable {
 public:
  AliasTable() = default;
  /// Weights must be non-negative with a positive sum.
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  std::size_t draw(CounterRng& rng) const;

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

/// Dual sampling distribution p_k = (1 - alpha)/n + alpha ||a_k|| / sum_i ||a_i||.
/// Falls back to uniform when every row has zero norm.
class SamplingPlan {
 public:
  SamplingPlan(const DataSet& ds, double alpha);

  std::span<const double> probabilities() const { return p_; }
  double probability(std::size_t k) const { return p_[k]; }
  double alpha() const { return alpha_; }
  std::size_t draw(CounterRng& rng) const { return table_.draw(rng); }

 private:
  double alpha_;
  std::vector<double> p_;
  AliasTable table_;
};

/// Uniform m-subset of {0..n-1} without replacement (Floyd's algorithm), returned
/// in ascending order. Each index is included with probability m/n. Makes m
/// calls to uniform_index (none when m = n); for m = 1 this is the same draw as
/// rng.uniform_index(n).
void sample_subset(CounterRng& rng, std::size_t n, std::size_t m, std::vector<std::size_t>& out);

}  // namespace spdc
