#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "spdc/dataset.hpp"
#include "spdc/errors.hpp"
#include "spdc/rng.hpp"
#include "spdc/sampling.hpp"

using namespace spdc;

TEST_CASE("counter generator: deterministic, stream separated, in range") {
  CounterRng a(7, RngStream::solver), b(7, RngStream::solver), c(7, RngStream::synthetic_data);
  bool differs = false;
  for (int k = 0; k < 100; ++k) {
    const auto va = a.next();
    CHECK(va == b.next());
    differs = differs || va != c.next();
  }
  CHECK(differs);
  CHECK(a.counter() == 100);
  for (int k = 0; k < 10000; ++k) {
    CHECK(a.uniform_index(13) < 13);
    const double u = a.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("alias table frequencies within 3 sigma (n = 10, 1e5 draws)") {
  const std::vector<double> w{1, 2, 3, 4, 0, 6, 0.5, 8, 9, 10};
  double total = 0.0;
  for (double v : w) total += v;
  const AliasTable table(w);
  CounterRng rng(11, RngStream::solver);
  const int draws = 100000;
  std::vector<int> counts(w.size(), 0);
  for (int k = 0; k < draws; ++k) ++counts[table.draw(rng)];
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double p = w[i] / total;
    CHECK(std::abs(counts[i] - draws * p) <= 3.0 * std::sqrt(draws * p * (1.0 - p)));
  }
  CHECK(counts[4] == 0);
  CHECK_THROWS_AS(AliasTable(std::vector<double>{0.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(AliasTable(std::vector<double>{1.0, -1.0}), ConfigError);
}

TEST_CASE("sampling plan mixes uniform and norm-proportional") {
  const DataSet unit = normalize_rows(generate_synthetic(10, 4, 1));
  const SamplingPlan flat(unit, 0.4);
  for (double p : flat.probabilities()) CHECK(p == doctest::Approx(0.1).epsilon(1e-14));

  const std::vector<std::size_t> first{0};
  const DataSet skew = scale_row_norms(unit, first, 11.0);
  const SamplingPlan plan(skew, 0.5);
  double sum = 0.0;
  for (double p : plan.probabilities()) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(plan.probability(0) == doctest::Approx(0.05 + 0.5 * 11.0 / 20.0).epsilon(1e-14));
  CHECK(plan.probability(1) == doctest::Approx(0.05 + 0.5 / 20.0).epsilon(1e-14));
  CHECK_THROWS_AS(SamplingPlan(skew, 0.0), ConfigError);
  CHECK_THROWS_AS(SamplingPlan(skew, 1.0), ConfigError);
}

TEST_CASE("subset sampling: sorted distinct subsets with inclusion m/n") {
  CounterRng rng(5, RngStream::solver);
  std::vector<std::size_t> batch;
  const std::size_t n = 12, m = 5;
  const int draws = 10000;
  std::vector<int> counts(n, 0);
  for (int k = 0; k < draws; ++k) {
    sample_subset(rng, n, m, batch);
    REQUIRE(batch.size() == m);
    CHECK(std::is_sorted(batch.begin(), batch.end()));
    CHECK(std::set<std::size_t>(batch.begin(), batch.end()).size() == m);
    for (std::size_t i : batch) ++counts[i];
  }
  const double p = double(m) / n;
  for (int c : counts) CHECK(std::abs(c - draws * p) <= 3.0 * std::sqrt(draws * p * (1.0 - p)));

  CounterRng all(1, RngStream::solver);
  sample_subset(all, 4, 4, batch);
  CHECK(batch == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(all.counter() == 0);

  CounterRng one(9, RngStream::solver), ref(9, RngStream::solver);
  for (int k = 0; k < 100; ++k) {
    sample_subset(one, 37, 1, batch);
    CHECK(batch.front() == ref.uniform_index(37));
  }
}
