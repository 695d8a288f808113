#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "beccert/distribution.hpp"
#include "beccert/prawitz.hpp"
#include "beccert/zero_bias.hpp"
#include "doctest.h"

using namespace beccert;
using doctest::Approx;

namespace {

PrawitzParams params(double u0, double u, QuadRule rule = QuadRule::GaussKronrod15) {
  PrawitzParams p;
  p.u0 = u0;
  p.u = u;
  p.rule = rule;
  return p;
}

}  // namespace

TEST_SUITE("prawitz") {
  TEST_CASE("kernel K") {
    const auto h = kernel_K(0.5);
    CHECK(h.real() == Approx(0.25).epsilon(1e-15));
    CHECK(h.imag() == Approx(0.5 / std::numbers::pi).epsilon(1e-15));
    // (1 - |u|) cot(pi u) -> -1/pi cancels sgn(u)/pi at the endpoints.
    CHECK(std::abs(kernel_K(1.0)) == 0.0);
    CHECK(std::abs(kernel_K(-1.0)) == 0.0);
    CHECK(std::abs(kernel_K(1.0 - 1e-7)) < 1e-6);
    for (double u = 0.01; u < 1.0; u += 0.01) CHECK(std::abs(kernel_K(-u)) == Approx(std::abs(kernel_K(u))).epsilon(1e-14));
    CHECK_THROWS_AS(kernel_K(0.0), DomainError);
    CHECK_THROWS_AS(kernel_K(1.5), DomainError);
    CHECK_THROWS_AS(kernel_K(-1.01), DomainError);
  }

  TEST_CASE("third integrand") {
    for (double U : {1.0, 5.9508, 12.0}) {
      CHECK(integral3_integrand(0.0, U) == Approx(0.5 / U).epsilon(1e-15));
      // Direct evaluation just outside the series window.
      const double direct = std::abs(kernel_K(1e-4 / U) / U - std::complex<double>(0.0, 1.0 / (2.0 * std::numbers::pi * 1e-4))) *
                            std::exp(-0.5e-8);
      CHECK(integral3_integrand(1e-4, U) == Approx(direct).epsilon(1e-7));
      CHECK(std::abs(integral3_integrand(1e-4, U) - 0.5 / U) < 1e-3 / U);
      for (double u : {0.3, 0.7, 1.0}) CHECK(integral3_integrand(-u * U, U) == integral3_integrand(u * U, U));
    }
    // Pinned after agreement of two independent evaluations.
    CHECK(integral3_integrand(2.4852, 5.9508) == Approx(0.0024915184831975192).epsilon(1e-13));
  }

  TEST_CASE("fourth integral against the exponential integral") {
    // E1(U0^2 / 2) / (2 pi), 30-digit values.
    CHECK(integral4(0.5).value == Approx(0.25837621544109711504).epsilon(1e-10));
    CHECK(std::abs(integral4(2.4852).value - 0.0018571117859827697842) < 1e-10);
    CHECK(std::abs(integral4(5.0).value - 4.4148698604122751921e-8) < 1e-12);
    CHECK(integral4(30.0).value < 1e-100);
    double prev = integral4(0.2).value;
    for (double u0 = 0.4; u0 < 20.0; u0 *= 2.0) {
      const double v = integral4(u0).value;
      CHECK(v < prev);
      prev = v;
    }
  }

  TEST_CASE("extremal general evaluation") {
    const auto r = prawitz_rhs(General{0.5092}, params(2.4852, 5.9508));
    CHECK(r.converged);
    CHECK(r.dstar >= 0.5590);
    CHECK(r.upper() <= 0.5606);
    CHECK(r.dstar == Approx(0.56054).epsilon(2e-5));
    CHECK(r.margin < 1e-9);
  }

  TEST_CASE("extremal i.i.d. evaluation") {
    const auto r = prawitz_rhs(IidFinite{0.3536, 8}, params(2.6157, 8.9115));
    CHECK(r.converged);
    CHECK(r.dstar >= 0.4770);
    CHECK(r.upper() <= 0.4785);
    CHECK(r.dstar == Approx(0.47849).epsilon(1e-4));
  }

  TEST_CASE("U0 = U leaves the middle integral empty") {
    const auto r = prawitz_rhs(General{0.4}, params(3.0, 3.0));
    CHECK(r.integrals[1] == 0.0);
    CHECK(r.dstar > 0.0);
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(prawitz_rhs(General{0.4}, params(4.0, 3.0)), DomainError);
    CHECK_THROWS_AS(prawitz_rhs(General{0.4}, params(0.0, 3.0)), DomainError);
    CHECK_THROWS_AS(prawitz_rhs(General{-0.4}, params(1.0, 3.0)), DomainError);
    CHECK_THROWS_AS(prawitz_rhs(IidFinite{0.2, 8}, params(1.0, 3.0)), DomainError);
  }

  TEST_CASE("two quadrature rules agree") {
    const BoundMode modes[] = {General{0.5092}, IidFinite{0.3536, 8}, IidTail{0.3, 30}};
    for (const auto& mode : modes) {
      const auto gk = prawitz_rhs(mode, params(2.5, 7.0));
      const auto gl = prawitz_rhs(mode, params(2.5, 7.0, QuadRule::GaussLegendre10));
      for (int i = 0; i < 4; ++i) CHECK(std::abs(gk.integrals[i] - gl.integrals[i]) <= 10.0 * 1e-11);
      CHECK(std::abs(gk.dstar - gl.dstar) <= 10.0 * 4e-11 / mode_epsilon(mode));
    }
  }

  TEST_CASE("doubling the half range is lossless") {
    QuadOptions opt;
    opt.abs_tol = 1e-13;
    const double U = 5.9508;
    const double u0 = 2.4852;
    auto f = [U](double u) { return integral3_integrand(u, U); };
    const double full = integrate(f, -u0, u0, opt).value;
    const double half = integrate(f, 0.0, u0, opt).value;
    CHECK(std::abs(full - 2.0 * half) < 1e-11);
    const auto r = prawitz_rhs(General{0.5092}, params(u0, U));
    CHECK(std::abs(r.integrals[2] - full) < 1e-10);
  }

  TEST_CASE("bridging inequality on sampled pairs") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
      const double u0 = 1.0 + 2.0 * unit(rng);
      const double u = u0 + 6.0 * unit(rng);
      const double e2 = 0.75 + 1.0 * unit(rng);
      const double e1 = e2 * (0.5 + 0.5 * unit(rng));
      const BoundMode pairs[][2] = {{General{e1}, General{e2}},
                                    {IidFinite{e1, 8}, IidFinite{e2, 8}},
                                    {IidTail{e1, 30}, IidTail{e2, 30}}};
      for (const auto& pr : pairs) {
        const auto lo = prawitz_rhs(pr[0], params(u0, u));
        const auto hi = prawitz_rhs(pr[1], params(u0, u));
        CHECK(lo.dstar <= (e2 / e1) * hi.dstar + lo.margin + hi.margin + 1e-12);
      }
    }
  }

  TEST_CASE("empirical soundness on exact two-point sums") {
    for (double p : {0.05, 0.2, 0.5, 0.7, 0.95}) {
      const auto d = DiscreteDistribution::two_point(p);
      const double beta = moments(d).beta3;
      for (int n = 1; n <= 6; ++n) {
        const auto s = standardize(convolve_power(d, n));
        const double eps = beta / std::sqrt(static_cast<double>(n));
        const double rho = kolmogorov_vs_normal(s);
        for (auto [u0, u] : {std::pair{1.0, 3.0}, std::pair{2.5, 6.0}, std::pair{3.0, 3.0}}) {
          const auto r = prawitz_rhs(General{eps}, params(u0, u));
          CHECK(rho <= eps * r.upper() + 1e-9);
        }
      }
    }
  }
}
