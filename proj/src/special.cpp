#include "beccert/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace beccert {

namespace {

// Maclaurin series sum_k (-2)^k x^{2k+1} / (2k+1)!!, fine for |x| < 0.5.
double dawson_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int k = 1; k < 40; ++k) {
    term *= -2.0 * x2 / (2.0 * k + 1.0);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Asymptotic series sum_k (2k-1)!! / (2^{k+1} x^{2k+1}) for large x.
double dawson_asymptotic(double x) {
  const double inv2 = 1.0 / (x * x);
  double term = 0.5 / x;
  double sum = term;
  for (int k = 1; k < 12; ++k) {
    term *= (2.0 * k - 1.0) * 0.5 * inv2;
    sum += term;
  }
  return sum;
}

// Rybicki's sampling-theorem representation
//   F(x) = lim_{h->0} pi^{-1/2} sum_{n odd} exp(-(x - n h)^2) / n,
// whose discretization error decays like exp(-(pi / 2h)^2). With h = 0.2 the
// discretization error is far below double precision. The +n / -n pair is
// folded together so the sum has no cancellation for x > 0.
double dawson_rybicki(double x) {
  constexpr double h = 0.2;
  constexpr double reach = 8.6;  // exp(-reach^2) < 1e-32
  const long lo = std::max(1L, static_cast<long>(std::floor((x - reach) / h)));
  const long hi = static_cast<long>(std::ceil((x + reach) / h));
  double sum = 0.0;
  for (long n = (lo % 2 == 0) ? lo + 1 : lo; n <= hi; n += 2) {
    const double nh = static_cast<double>(n) * h;
    const double d = x - nh;
    sum += std::exp(-d * d) * -std::expm1(-4.0 * x * nh) / static_cast<double>(n);
  }
  return sum * std::numbers::inv_sqrtpi;
}

}  // namespace

double dawson(double x) {
  const double ax = std::abs(x);
  double v;
  if (ax < 0.5) {
    return dawson_series(x);
  } else if (ax > 40.0) {
    v = dawson_asymptotic(ax);
  } else {
    v = dawson_rybicki(ax);
  }
  return x < 0.0 ? -v : v;
}

double damped_s2_integral(double t) {
  const double at = std::abs(t);
  if (at < 0.5) {
    // int_0^T (s^2/2) e^{s^2/2} ds = sum_k T^{2k+3} / (2^{k+1} k! (2k+3))
    const double t2 = at * at;
    double coef = 0.5 * at * t2;  // T^3 / 2
    double sum = coef / 3.0;
    for (int k = 1; k < 30; ++k) {
      coef *= 0.5 * t2 / k;
      const double term = coef / (2.0 * k + 3.0);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return sum * std::exp(-0.5 * t2);
  }
  return 0.5 * at - dawson(at / std::numbers::sqrt2) / std::numbers::sqrt2;
}

}  // namespace beccert
