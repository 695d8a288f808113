#include <cmath>
#include <random>
#include <vector>

#include "beccert/distribution.hpp"
#include "beccert/zero_bias.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace beccert;
using doctest::Approx;

namespace {

// kappa1(W, W*) by a fine midpoint rule on the support; an oracle that
// shares no code with the segment-exact implementation.
double kappa1_riemann(const DiscreteDistribution& d, int cells) {
  const auto f = StepCdf(d);
  const auto g = zero_bias_cdf(d);
  const double lo = d.atoms().front();
  const double hi = d.atoms().back();
  const double h = (hi - lo) / cells;
  double acc = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double x = lo + (i + 0.5) * h;
    acc += std::abs(f(x) - g(x));
  }
  return acc * h;
}

}  // namespace

TEST_SUITE("zero_bias") {
  TEST_CASE("zero-bias density") {
    const auto r = zero_bias_density(DiscreteDistribution::rademacher());
    CHECK(r(-0.999) == Approx(0.5));
    CHECK(r(0.0) == Approx(0.5));
    CHECK(r(0.999) == Approx(0.5));
    CHECK(r(1.5) == 0.0);
    CHECK(r(-1.5) == 0.0);

    const double p = 0.3;
    const auto t = zero_bias_density(DiscreteDistribution::two_point(p));
    CHECK(t(0.1) == Approx(std::sqrt(p * (1.0 - p))).epsilon(1e-12));
    CHECK(t(-0.5) == Approx(std::sqrt(p * (1.0 - p))).epsilon(1e-12));

    const auto three = threepoint_params(2.0, 0.5, 1.0).distribution();
    CHECK(zero_bias_density(three).integral() == Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(zero_bias_density(DiscreteDistribution({0.0, 1.0}, {0.5, 0.5})), DomainError);
    CHECK_THROWS_AS(zero_bias_density(DiscreteDistribution::point_mass(0.0)), DomainError);
  }

  TEST_CASE("zero-bias cdf") {
    const auto r = zero_bias_cdf(DiscreteDistribution::rademacher());
    for (double x : {-1.0, -0.4, 0.0, 0.3, 1.0}) CHECK(r(x) == Approx(0.5 * (x + 1.0)));
    CHECK(r(-2.0) == 0.0);
    CHECK(r(2.0) == 1.0);

    const double p = 0.8;
    const double q = 1.0 - p;
    const auto t = zero_bias_cdf(DiscreteDistribution::two_point(p));
    const double lo = -std::sqrt(q / p);
    const double hi = std::sqrt(p / q);
    for (double x : {lo, 0.0, 0.7, hi}) {
      CHECK(t(x) == Approx(std::sqrt(p * q) * (x - lo)).epsilon(1e-12));
    }

    // Three atoms -a < -b < c: value p(a - b) at -b and p(a - b) + (p a + q b) b at 0.
    const auto tp = threepoint_params(2.0, 0.5, 1.0);
    const auto g = zero_bias_cdf(tp.distribution());
    CHECK(g(-0.5) == Approx(tp.p * tp.a * (tp.a - tp.b)).epsilon(1e-12));
    CHECK(g(0.0) == Approx(g(-0.5) + (tp.p * tp.a + tp.q * tp.b) * tp.b).epsilon(1e-12));
    CHECK(g(1.0) == Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("mean metric") {
    const auto r = DiscreteDistribution::rademacher();
    CHECK(kappa1(StepCdf(r), StepCdf(r)) == 0.0);
    CHECK(kappa1(StepCdf(r), StepCdf(r).as_piecewise_linear()) == Approx(0.0).epsilon(1e-15));
    CHECK(kappa1(StepCdf(r), zero_bias_cdf(r)) == Approx(0.5).epsilon(1e-14));

    const auto t = DiscreteDistribution::two_point(0.9);
    CHECK(kappa1(StepCdf(t), zero_bias_cdf(t)) == Approx(0.5 * 2.733333333333333).epsilon(1e-12));

    // Shift of a point mass by h has kappa1 = h.
    CHECK(kappa1(StepCdf(DiscreteDistribution::point_mass(0.0)), StepCdf(DiscreteDistribution::point_mass(0.25))) ==
          Approx(0.25));
  }

  TEST_CASE("kappa1 against high-precision and dense-grid oracles") {
    // 30-digit oracle values: atoms (-2, -1/2, 1) with probs (1/9, 4/9, 4/9).
    const auto three = threepoint_params(2.0, 0.5, 1.0).distribution();
    CHECK(kappa1(StepCdf(three), zero_bias_cdf(three)) == Approx(0.41666666666666666667).epsilon(1e-13));

    const auto five = standardize(
        DiscreteDistribution({-2.1, -0.7, 0.2, 1.1, 2.5}, {0.1, 0.25, 0.3, 0.2, 0.15}));
    const double k1 = kappa1(StepCdf(five), zero_bias_cdf(five));
    CHECK(k1 == Approx(0.23146500272496710251).epsilon(1e-12));
    CHECK(moments(five).beta3 == Approx(1.5297254252215360268).epsilon(1e-12));
    CHECK(std::abs(k1 - kappa1_riemann(five, 400000)) < 1e-8);
  }

  TEST_CASE("zero-bias gap") {
    for (int i = 1; i <= 99; ++i) {
      CHECK(std::abs(zero_bias_gap(DiscreteDistribution::two_point(i / 100.0))) < 1e-12);
    }
    const auto three = threepoint_params(2.0, 0.5, 1.0).distribution();
    CHECK(zero_bias_gap(three) == Approx(-threepoint_g(2.0, 0.5, 1.0).g).epsilon(1e-12));
    CHECK(zero_bias_gap(three) >= 0.0);

    std::mt19937_64 rng(5150);
    for (int trial = 0; trial < 500; ++trial) {
      const auto d = testing::random_standardized(rng, 2 + trial % 5);
      const double gap = zero_bias_gap(d);
      CHECK(gap >= -1e-10);
      if (trial % 50 == 0) {
        CHECK(std::abs(0.5 * moments(d).beta3 - gap - kappa1_riemann(d, 200000)) < 1e-7);
      }
    }
    CHECK_THROWS_AS(zero_bias_gap(DiscreteDistribution({0.0, 2.0}, {0.5, 0.5})), DomainError);
  }

  TEST_CASE("three-point parameters") {
    const auto t = threepoint_params(2.0, 0.5, 1.0);
    CHECK(t.p == Approx(1.0 / 9.0));
    CHECK(t.q == Approx(4.0 / 9.0));
    CHECK(t.r == Approx(4.0 / 9.0));
    CHECK(t.feasible());
    // Moment equations.
    CHECK(t.p + t.q + t.r == Approx(1.0));
    CHECK(-t.p * t.a - t.q * t.b + t.r * t.c == Approx(0.0).epsilon(1e-14));
    CHECK(t.p * t.a * t.a + t.q * t.b * t.b + t.r * t.c * t.c == Approx(1.0));

    const auto rad = threepoint_params(1.0, 0.0, 1.0);
    CHECK(rad.p == Approx(0.5));
    CHECK(rad.q == Approx(0.0));
    CHECK(rad.r == Approx(0.5));
    CHECK(rad.distribution() == DiscreteDistribution::rademacher());

    CHECK_FALSE(threepoint_params(2.0, 0.5, 0.4).feasible());
    CHECK_THROWS_AS(threepoint_g(2.0, 0.5, 0.4), DomainError);
    CHECK_THROWS_AS(threepoint_params(0.5, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(threepoint_params(1.0, -0.1, 1.0), DomainError);
  }

  TEST_CASE("three-point g") {
    const auto v = threepoint_g(2.0, 0.5, 1.0);
    CHECK(v.which == ThreePointCase::B);
    CHECK(v.g == Approx(-0.2777777777777778).epsilon(1e-12));

    // a(a - b) = 1 joins cases A and B; c(b + c) = 1 joins B and C.
    for (double b : {0.0, 0.2, 0.45}) {
      const double a = 0.5 * (b + std::sqrt(b * b + 4.0));
      for (double c : {1.2, 2.0, 3.0}) {
        if (b * c > 1.0 || a * c < 1.0) continue;
        const auto t = threepoint_params(a, b, c);
        CHECK(std::abs(threepoint_case_a(t) - threepoint_case_b(t)) < 1e-10);
      }
    }
    for (double b : {0.0, 0.1, 0.3}) {
      const double c = 0.5 * (-b + std::sqrt(b * b + 4.0));
      for (double a : {1.5, 2.5, 4.0}) {
        if (b * c > 1.0 || a * c < 1.0 || a <= b) continue;
        const auto t = threepoint_params(a, b, c);
        CHECK(std::abs(threepoint_case_b(t) - threepoint_case_c(t)) < 1e-10);
      }
    }
  }

  TEST_CASE("three-point g is nonpositive and matches the CDF machinery") {
    int checked = 0;
    for (int i = 0; i < 12; ++i) {
      const double c = 0.15 * std::pow(50.0, i / 11.0);
      for (int j = 0; j < 12; ++j) {
        double a = std::pow(8.0, j / 11.0) / c;
        while (a * c < 1.0) a = std::nextafter(a, 2.0 * a);
        for (int k = 0; k < 8; ++k) {
          const double b = 0.99 * k / 7.0 * std::min(a, 1.0 / c);
          const auto v = threepoint_g(a, b, c);
          CHECK(v.g <= 1e-10);
          const auto d = threepoint_params(a, b, c).distribution();
          const double via_cdf = kappa1(StepCdf(d), zero_bias_cdf(d)) - 0.5 * moments(d).beta3;
          CHECK(std::abs(v.g - via_cdf) < 1e-10 * std::max(1.0, moments(d).beta3));
          ++checked;
        }
      }
    }
    CHECK(checked == 12 * 12 * 8);
  }

  TEST_CASE("mixture representation of the zero-biased sum") {
    const auto r = DiscreteDistribution::rademacher();
    const std::vector<DiscreteDistribution> one{DiscreteDistribution::two_point(0.3)};
    CHECK(sup_distance(mixture_zero_bias_sum(one), zero_bias_cdf(one[0])) < 1e-12);

    const std::vector<DiscreteDistribution> pair{r, r};
    const auto direct = zero_bias_cdf(standardize(convolve(r, r)));
    CHECK(sup_distance(mixture_zero_bias_sum(pair), direct) < 1e-10);

    const std::vector<DiscreteDistribution> triple{r, r, r};
    const auto ns = normalized_sum(triple);
    CHECK(ns.lyapunov == Approx(1.0 / std::sqrt(3.0)));
    CHECK(kappa1(StepCdf(ns.sum), mixture_zero_bias_sum(triple)) <= 0.5 / std::sqrt(3.0) + 1e-10);
  }

  TEST_CASE("mixture identity and sum bound on random collections") {
    std::mt19937_64 rng(424242);
    for (int trial = 0; trial < 120; ++trial) {
      std::vector<DiscreteDistribution> ds;
      const int n = 1 + trial % 4;
      for (int j = 0; j < n; ++j) ds.push_back(testing::random_centered(rng, 2 + (trial + j) % 2));
      const auto ns = normalized_sum(ds);
      const auto mix = mixture_zero_bias_sum(ds);
      CHECK(sup_distance(mix, zero_bias_cdf(ns.sum)) < 1e-9);
      CHECK(kappa1(StepCdf(ns.sum), mix) <= 0.5 * ns.lyapunov + 1e-10);
    }
  }

  TEST_CASE("zeta3 optimality ratio") {
    CHECK(zeta3_ratio_lower(0.5) == Approx(0.0).epsilon(1e-15));
    CHECK(zeta3_ratio_lower(0.9) == Approx(2.666666666666667 / 2.733333333333333 / 6.0).epsilon(1e-12));
    CHECK(zeta3_ratio_lower(0.9) == Approx(0.16260).epsilon(1e-4));
    CHECK(zeta3_ratio_lower(0.999) >= 1.0 / 6.0 - 1e-3);
    double prev = -1.0;
    for (double p = 0.5; p <= 0.999; p += 0.001) {
      const double v = zeta3_ratio_lower(p);
      CHECK(v > prev);
      CHECK(v < 1.0 / 6.0);
      prev = v;
    }
  }
}
