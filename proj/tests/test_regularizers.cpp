#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spdc/regularizers.hpp"
#include "spdc/rng.hpp"

using namespace spdc;

namespace {

std::pair<double, double> catchup_from(double x, double u, std::uint64_t gap, const Regularizer& reg, double tau) {
  const std::vector<double> xs{x}, us{u};
  const LazyCoordState state(xs, us);
  return lazy_catchup(reg, state, 0, gap, tau);
}

}  // namespace

TEST_CASE("primal_prox closed forms") {
  CHECK(primal_prox(Regularizer::l2(1.0), 1.0, 0.0, 1.0) == 0.5);
  const Regularizer en = Regularizer::elastic(0.5, 1.0);
  CHECK(primal_prox(en, 0.3, 0.1, 1.0) == 0.0);   // x - tau g = 0.2 inside [-0.5, 0.5]
  CHECK(primal_prox(en, 0.5, 0.0, 1.0) == 0.0);   // tie maps to zero
  CHECK(primal_prox(en, 2.0, 0.0, 1.0) == 0.75);  // (2 - 0.5) / 2
  CHECK(primal_prox(en, -2.0, 0.5, 1.0) == -1.0); // (-2.5 + 0.5) / 2
  CHECK(Regularizer::elastic(0.0, 2.0).kind == RegKind::squared_l2);

  CounterRng rng(1, RngStream::solver);
  for (int c = 0; c < 200; ++c) {
    const double x = rng.normal(), g = rng.normal(), lam = rng.uniform01() + 0.01, tau = rng.uniform01() + 0.01;
    const Regularizer as_en{RegKind::elastic_net, 0.0, lam};
    CHECK(primal_prox(as_en, x, g, tau) == primal_prox(Regularizer::l2(lam), x, g, tau));
  }
}

TEST_CASE("lazy catch-up for squared l2") {
  const auto [x2, x1] = catchup_from(1.0, 0.0, 2, Regularizer::l2(1.0), 1.0);
  CHECK(x2 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(x1 == doctest::Approx(0.5).epsilon(1e-15));

  const auto [same, prev] = catchup_from(0.7, 0.3, 0, Regularizer::l2(1.0), 0.5);
  CHECK(same == 0.7);
  CHECK(prev == 0.7);

  // x = -u / lambda is a fixed point.
  for (std::uint64_t gap : {1ull, 7ull, 1000ull, 10000000ull}) {
    CHECK(catchup_from(-0.6 / 2.0, 0.6, gap, Regularizer::l2(2.0), 0.3).first ==
          doctest::Approx(-0.3).epsilon(1e-14));
  }
  // Matches stepping, and stays accurate for very long gaps.
  double x = 2.0;
  for (int s = 0; s < 500; ++s) x = primal_prox(Regularizer::l2(0.01), x, 0.2, 0.05);
  CHECK(catchup_from(2.0, 0.2, 500, Regularizer::l2(0.01), 0.05).first == doctest::Approx(x).epsilon(1e-13));
  CHECK(l2_advance(2.0, 0.2, 0.01, 0.05, 500) == doctest::Approx(x).epsilon(1e-13));
  // The limit is the fixed point of the step as evaluated in floating point,
  // -tau u / (fl(1 + lambda tau) - 1), which differs from -u/lambda = -20 by ~1e-13.
  const double q = 1.0 + 0.01 * 0.05;
  CHECK(catchup_from(2.0, 0.2, 100000000, Regularizer::l2(0.01), 0.05).first ==
        doctest::Approx(-0.05 * 0.2 / (q - 1.0)).epsilon(1e-14));
  CHECK(catchup_from(2.0, 0.2, 100000000, Regularizer::l2(0.01), 0.05).first ==
        doctest::Approx(-20.0).epsilon(1e-12));
}

TEST_CASE("lazy catch-up for the elastic net") {
  const Regularizer en = Regularizer::elastic(0.5, 1.0);
  const auto [x2, x1] = catchup_from(1.0, 0.0, 2, en, 1.0);
  CHECK(x2 == 0.0);
  CHECK(x1 == doctest::Approx(0.25).epsilon(1e-15));

  // Zero stays zero while -u lies in [-lambda1, lambda1].
  for (std::uint64_t gap : {1ull, 50ull, 123456789ull}) {
    CHECK(catchup_from(0.0, 0.3, gap, Regularizer::elastic(0.4, 0.1), 0.2).first == 0.0);
  }

  // lambda1 = 0 reproduces the l2 catch-up.
  CounterRng rng(2, RngStream::solver);
  for (int c = 0; c < 100; ++c) {
    const double x = rng.normal(), u = rng.normal(), lam = rng.uniform01() + 0.01, tau = rng.uniform01();
    const auto gap = rng.uniform_index(200);
    const std::vector<double> xs{x}, us{u};
    const LazyCoordState state(xs, us);
    const auto a = lazy_catchup_elastic(state, 0, gap, 0.0, lam, tau);
    const auto b = lazy_catchup_l2(state, 0, gap, lam, tau);
    CHECK(a.first == doctest::Approx(b.first).epsilon(1e-13));
    CHECK(a.second == doctest::Approx(b.second).epsilon(1e-13));
  }

  // Crossing from positive through the dead zone to the negative regime.
  const Regularizer cross = Regularizer::elastic(0.1, 0.5);
  double x = 3.0, prev = x;
  for (int s = 0; s < 60; ++s) {
    prev = x;
    x = primal_prox(cross, x, 0.4, 0.3);
  }
  const auto [cx, cprev] = catchup_from(3.0, 0.4, 60, cross, 0.3);
  CHECK(x < 0.0);
  CHECK(cx == doctest::Approx(x).epsilon(1e-12));
  CHECK(cprev == doctest::Approx(prev).epsilon(1e-12));
}

TEST_CASE("catch-up refuses to run backwards") {
  std::vector<double> xs{1.0}, us{0.0};
  LazyCoordState state(xs, us);
  state.touch(0, 5, 1.0, 1.0, 0.0);
  CHECK_THROWS_AS(lazy_catchup_l2(state, 0, 4, 1.0, 1.0), std::logic_error);
}

TEST_CASE("regularizer conjugates") {
  const std::vector<double> zero(3, 0.0);
  CHECK(conjugate_reg_value(Regularizer::l2(2.0), zero) == 0.0);
  const std::vector<double> small{0.1, -0.2, 0.3};
  CHECK(conjugate_reg_value(Regularizer::elastic(0.3, 1.0), small) == 0.0);
  const double lam = 0.7;
  const std::vector<double> u{lam * 0.6, lam * 0.8};
  CHECK(conjugate_reg_value(Regularizer::l2(lam), u) == doctest::Approx(lam / 2.0).epsilon(1e-15));
  // Pure l1 (lambda2 = 0): indicator of the l-infinity ball.
  const Regularizer l1{RegKind::elastic_net, 0.5, 0.0};
  CHECK(l1.conjugate(small) == 0.0);
  CHECK(std::isinf(l1.conjugate(std::vector<double>{0.6})));

  // Coordinate-wise grid maximization of x u - g(x).
  CounterRng rng(3, RngStream::solver);
  for (int c = 0; c < 30; ++c) {
    const Regularizer reg = Regularizer::elastic(0.5 * rng.uniform01(), 0.5 + rng.uniform01());
    std::vector<double> v(1 + rng.uniform_index(3));
    for (double& e : v) e = 2.0 * rng.normal();
    double total = 0.0;
    for (double e : v) {
      double best = -INFINITY;
      for (int k = -400000; k <= 400000; ++k) {
        const double xx = k * 2.5e-5;
        best = std::max(best, xx * e - reg.lambda1 * std::abs(xx) - 0.5 * reg.lambda2 * xx * xx);
      }
      total += best;
    }
    CHECK(conjugate_reg_value(reg, v) == doctest::Approx(total).epsilon(1e-6).scale(1.0));
  }
}
