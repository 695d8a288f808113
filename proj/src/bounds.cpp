#include "beccert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "beccert/distribution.hpp"
#include "beccert/special.hpp"

namespace beccert {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Derivative of (cos x - 1 + x^2/2) / x^3, times x^4.
double ratio_slope(double x) {
  return -x * std::sin(x) - 0.5 * x * x - 3.0 * std::cos(x) + 3.0;
}

}  // namespace

BoundConstants BoundConstants::compute() {
  // The maximizer lies in (3, 5): the slope changes sign exactly once there.
  double lo = 3.0;
  double hi = 5.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ratio_slope(mid) > 0.0 ? lo : hi) = mid;
  }
  BoundConstants k;
  k.M = 0.5 * (lo + hi);
  k.a = (std::cos(k.M) - 1.0 + 0.5 * k.M * k.M) / (k.M * k.M * k.M);
  k.l = std::exp(-1.0 / (216.0 * k.a * k.a));
  return k;
}

const BoundConstants& BoundConstants::get() {
  static const BoundConstants k = compute();
  return k;
}

double b(double t, double gamma) {
  if (!(gamma > 0.0)) {
    throw DomainError("b(t, gamma) needs gamma > 0, got " + std::to_string(gamma));
  }
  const auto& k = BoundConstants::get();
  const double at = std::abs(t);
  const double x = gamma * at;
  if (x < k.M) return -at * at + 2.0 * gamma * k.a * at * at * at;
  if (x <= kTwoPi) return -2.0 * (1.0 - std::cos(x)) / (gamma * gamma);
  return 0.0;
}

BranchPoints branch_points(double gamma) {
  return {BoundConstants::get().M / gamma, kTwoPi / gamma};
}

double f_hat1(double epsilon, double t) {
  return std::exp(0.5 * b(t, 2.0 * epsilon));
}

double delta_hat1(double epsilon, double t) {
  return epsilon * damped_s2_integral(t);
}

double delta_hat2_seam(double epsilon) {
  return std::cbrt(1.0 / epsilon) / (6.0 * BoundConstants::get().a);
}

namespace {

double delta_hat2_impl(double epsilon, double t, bool printed) {
  const auto& k = BoundConstants::get();
  const double at = std::abs(t);
  const double seam = delta_hat2_seam(epsilon);
  const double e13 = std::cbrt(epsilon);
  if (at <= seam) {
    const double big_t = at * e13;
    // exp(t^2 (eps^{2/3} - 1) / 2) (T/2 - Daw(T/sqrt2)/sqrt2), T = t eps^{1/3}
    return std::exp(0.5 * at * at * (e13 * e13 - 1.0)) * damped_s2_integral(big_t);
  }
  const double t0 = 1.0 / (6.0 * k.a);  // seam * eps^{1/3}
  double head;
  if (printed) {
    head = std::exp(0.5 * (t0 * t0 - at * at)) *
           (0.5 * t0 * t0 - dawson(t0 / std::numbers::sqrt2) / std::numbers::sqrt2);
  } else {
    head = std::exp(-0.5 * at * at) * std::exp(0.5 * t0 * t0) * damped_s2_integral(t0);
  }
  const double coef = 2.0 * k.a * epsilon;
  const double tail = (std::exp(coef * at * at * at - 0.5 * at * at) -
                       std::exp(coef * seam * seam * seam - 0.5 * at * at)) /
                      (12.0 * k.a * k.l);
  return head + tail;
}

}  // namespace

double delta_hat2(double epsilon, double t) {
  return delta_hat2_impl(epsilon, t, false);
}

double delta_hat2_as_printed(double epsilon, double t) {
  return delta_hat2_impl(epsilon, t, true);
}

QuadResult delta_hat1_quadrature(double epsilon, double t, const QuadOptions& opt) {
  const double at = std::abs(t);
  auto f = [&](double s) { return 0.5 * s * s * std::exp(0.5 * (s * s - at * at)); };
  auto r = integrate(f, 0.0, at, opt);
  r.value *= epsilon;
  r.error *= epsilon;
  return r;
}

QuadResult delta_hat2_quadrature(double epsilon, double t, const QuadOptions& opt) {
  const auto& k = BoundConstants::get();
  const double at = std::abs(t);
  const double seam = delta_hat2_seam(epsilon);
  const double e23 = std::cbrt(epsilon) * std::cbrt(epsilon);
  auto head = [&](double s) {
    return 0.5 * s * s * std::exp(0.5 * (s * s * e23 - at * at));
  };
  auto r = integrate(head, 0.0, std::min(at, seam), opt);
  if (at > seam) {
    auto tail = [&](double s) {
      return 0.5 * s * s / k.l * std::exp(2.0 * k.a * epsilon * s * s * s - 0.5 * at * at);
    };
    r += integrate(tail, seam, at, opt);
  }
  r.value *= epsilon;
  r.error *= epsilon;
  return r;
}

IidContext IidContext::make(double epsilon, int n, int m) {
  if (!(epsilon > 0.0) || n < 1 || m < 1) {
    throw DomainError("i.i.d. context needs eps > 0, n >= 1, m >= 1");
  }
  if (epsilon * std::sqrt(static_cast<double>(n)) < 1.0 - 1e-9) {
    throw DomainError("eps * sqrt(n) must be >= 1 for i.i.d. summands");
  }
  return {epsilon, n, m, 1.0 / std::sqrt(static_cast<double>(n))};
}

namespace {

double iid_base(const IidContext& ctx, double s) {
  const double n = static_cast<double>(ctx.n);
  return std::max(0.0, 1.0 + b(s, ctx.epsilon + ctx.tau) / n);
}

}  // namespace

double f_hat2(const IidContext& ctx, double t) {
  return std::pow(iid_base(ctx, t), 0.5 * ctx.n);
}

double f_hat3(double epsilon, int m, double t) {
  if (m < 1) throw DomainError("f_hat3 needs m >= 1");
  return std::exp(0.5 * b(t, epsilon + 1.0 / std::sqrt(static_cast<double>(m))));
}

QuadResult delta_hat3(const IidContext& ctx, double t, const QuadOptions& opt) {
  const double at = std::abs(t);
  const double power = 0.5 * (ctx.n - 1);
  auto f = [&](double s) {
    const double base = iid_base(ctx, s);
    const double lead = power == 0.0 ? 1.0 : std::pow(base, power);
    return lead * 0.5 * s * s * std::exp(0.5 * (s * s - at * at));
  };
  const auto bp = branch_points(ctx.epsilon + ctx.tau);
  const auto pts = break_points(0.0, at, {bp.cubic_end, bp.cosine_end});
  auto r = integrate(f, pts, opt);
  r.value *= ctx.epsilon;
  r.error *= ctx.epsilon;
  return r;
}

QuadResult delta_hat4(double epsilon, int m, double t, const QuadOptions& opt) {
  if (m < 1) throw DomainError("delta_hat4 needs m >= 1");
  const double at = std::abs(t);
  const double gamma = epsilon + 1.0 / std::sqrt(static_cast<double>(m));
  const double coef = (m - 1.0) / (2.0 * m);
  auto f = [&](double s) {
    const double lead = coef == 0.0 ? 0.0 : coef * b(s, gamma);
    return 0.5 * s * s * std::exp(lead + 0.5 * (s * s - at * at));
  };
  const auto bp = branch_points(gamma);
  const auto pts = break_points(0.0, at, {bp.cubic_end, bp.cosine_end});
  auto r = integrate(f, pts, opt);
  r.value *= epsilon;
  r.error *= epsilon;
  return r;
}

namespace {

std::optional<double> auxiliary_bound(double eps, double eps_hat, double eps1,
                                      double eps2) {
  if (eps_hat + eps1 > 0.2) return std::nullopt;
  const double s = eps_hat + eps1;
  const double bound =
      0.27283 * eps_hat + 0.19948 * eps1 + 0.09116 * eps2 + 0.00095 * s * s;
  return bound / eps;
}

}  // namespace

std::optional<double> small_eps_bound_general(double epsilon) {
  if (!(epsilon > 0.0) || epsilon >= 1.0) return std::nullopt;
  const double lambda = 1.0 / (1.0 - std::cbrt(epsilon) * std::cbrt(epsilon));
  const double eps_hat = std::pow(lambda, 1.5) * epsilon;
  const double eps1 = eps_hat;
  const double eps2 = std::pow(eps1, 4.0 / 3.0);
  return auxiliary_bound(epsilon, eps_hat, eps1, eps2);
}

long min_sample_size(double epsilon) {
  const double x = 1.0 / (epsilon * epsilon);
  // Rounding may only ever admit one extra (smaller) n, never drop one.
  return std::max(1L, static_cast<long>(std::ceil(x * (1.0 - 1e-12))));
}

std::optional<double> small_eps_bound_iid(double epsilon) {
  if (!(epsilon > 0.0)) return std::nullopt;
  const double n0 = static_cast<double>(min_sample_size(epsilon));
  if (n0 < 2.0) return std::nullopt;
  const double lambda = n0 / (n0 - 1.0);
  const double l32 = std::pow(lambda, 1.5);
  const double eps1 = l32 / std::sqrt(n0);
  const double eps2 = lambda * lambda / n0;
  return auxiliary_bound(epsilon, l32 * epsilon, eps1, eps2);
}

}  // namespace beccert
