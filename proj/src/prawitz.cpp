#include "beccert/prawitz.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "beccert/bounds.hpp"
#include "beccert/distribution.hpp"

namespace beccert {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// (1 - v) cot(pi v) for v in (0, 1]; tends to -1/pi as v -> 1.
double damped_cot(double v) {
  if (v <= 0.5) return (1.0 - v) / std::tan(kPi * v);
  const double w = 1.0 - v;
  if (w < 1e-6) return -(1.0 - kPi * kPi * w * w / 3.0) / kPi;
  return -w / std::tan(kPi * w);
}

// cot(x) - 1/x without cancellation near 0.
double cot_minus_inverse(double x) {
  if (std::abs(x) < 0.1) {
    const double x2 = x * x;
    return -x * (1.0 / 3.0 +
                 x2 * (1.0 / 45.0 +
                       x2 * (2.0 / 945.0 + x2 * (1.0 / 4725.0 + x2 * 2.0 / 93555.0))));
  }
  return 1.0 / std::tan(x) - 1.0 / x;
}

double gauss(double u) { return std::exp(-0.5 * u * u); }

double kernel_weight(double u, double big_u) {
  return std::abs(kernel_K(u / big_u)) / big_u;
}

}  // namespace

void PrawitzParams::validate() const {
  if (!(u0 > 0.0) || !(u >= u0) || !std::isfinite(u)) {
    throw DomainError("smoothing parameters need 0 < U0 <= U");
  }
  if (!(quad_tol > 0.0) || !(truncation > 0.0)) {
    throw DomainError("quadrature tolerance and truncation must be positive");
  }
}

double mode_epsilon(const BoundMode& mode) {
  return std::visit([](const auto& m) { return m.epsilon; }, mode);
}

std::string mode_name(const BoundMode& mode) {
  return std::visit(Overloaded{[](const General&) { return std::string("general"); },
                               [](const IidFinite&) { return std::string("iid-finite"); },
                               [](const IidTail&) { return std::string("iid-tail"); }},
                    mode);
}

BoundMode with_epsilon(const BoundMode& mode, double epsilon) {
  return std::visit(
      [epsilon](auto m) -> BoundMode {
        m.epsilon = epsilon;
        return m;
      },
      mode);
}

std::complex<double> kernel_K(double u) {
  const double v = std::abs(u);
  if (!(v > 0.0) || v > 1.0) {
    throw DomainError("kernel_K is defined for 0 < |u| <= 1");
  }
  const double sg = u > 0.0 ? 1.0 : -1.0;
  return {0.5 * (1.0 - v), 0.5 * sg * (damped_cot(v) + 1.0 / kPi)};
}

double integral3_integrand(double u, double big_u) {
  const double v = std::abs(u) / big_u;
  if (v == 0.0) return 0.5 / big_u;
  if (v <= 0.5) {
    // K(v)/U - i/(2 pi u) = (1 - v)/(2U) + i/(2U) (cot x - 1/x)(1 - x/pi), x = pi v
    const double x = kPi * v;
    const double re = 0.5 * (1.0 - v) / big_u;
    const double im = 0.5 * cot_minus_inverse(x) * (1.0 - x / kPi) / big_u;
    return std::hypot(re, im) * gauss(u);
  }
  const auto k = kernel_K(u / big_u) / big_u - std::complex<double>(0.0, 0.5 / (kPi * u));
  return std::abs(k) * gauss(u);
}

QuadResult integral4(double u0, double truncation, double quad_tol) {
  if (!(u0 > 0.0)) throw DomainError("integral4 needs U0 > 0");
  QuadResult r;
  const double upper = std::max(u0, truncation);
  if (u0 < truncation) {
    auto f = [](double u) { return gauss(u) / (kPi * u); };
    QuadOptions opt;
    opt.abs_tol = quad_tol;
    r = integrate(f, u0, truncation, opt);
  }
  // (1/pi) int_T^inf e^{-u^2/2}/u du <= e^{-T^2/2} / (pi T^2)
  r.error += gauss(upper) / (kPi * upper * upper);
  return r;
}

PrawitzResult prawitz_rhs(const BoundMode& mode, const PrawitzParams& params) {
  params.validate();
  const double eps = mode_epsilon(mode);
  if (!(eps > 0.0)) throw DomainError("epsilon must be positive");

  QuadOptions opt;
  opt.abs_tol = params.quad_tol;
  opt.rule = params.rule;
  QuadOptions inner = opt;
  inner.abs_tol = 1e-2 * params.quad_tol;

  const double u0 = params.u0;
  const double big_u = params.u;
  PrawitzResult out;

  // Propagated error of nested inner integrals: sup of weight * inner error,
  // times the outer interval length.
  double nested_sup = 0.0;

  auto delta_bound = std::visit(
      Overloaded{
          [&](const General& g) -> std::function<double(double)> {
            return [eps = g.epsilon](double u) {
              return std::min(delta_hat1(eps, u), delta_hat2(eps, u));
            };
          },
          [&](const IidFinite& f) -> std::function<double(double)> {
            const auto ctx = IidContext::make(f.epsilon, f.n);
            return [ctx, inner, big_u, &nested_sup, &out](double u) {
              const auto r = delta_hat3(ctx, u, inner);
              nested_sup = std::max(nested_sup, r.error * kernel_weight(u, big_u));
              out.evaluations += r.evaluations;
              out.converged = out.converged && r.converged;
              return r.value;
            };
          },
          [&](const IidTail& t) -> std::function<double(double)> {
            return [eps = t.epsilon, m = t.m, inner, big_u, &nested_sup, &out](double u) {
              const auto r = delta_hat4(eps, m, u, inner);
              nested_sup = std::max(nested_sup, r.error * kernel_weight(u, big_u));
              out.evaluations += r.evaluations;
              out.converged = out.converged && r.converged;
              return r.value;
            };
          }},
      mode);

  std::function<double(double)> modulus_bound;
  double gamma = 0.0;
  std::vector<double> inner_breaks;
  std::visit(Overloaded{[&](const General& g) {
                          gamma = 2.0 * g.epsilon;
                          modulus_bound = [eps = g.epsilon](double u) { return f_hat1(eps, u); };
                          inner_breaks.push_back(delta_hat2_seam(g.epsilon));
                        },
                        [&](const IidFinite& f) {
                          const auto ctx = IidContext::make(f.epsilon, f.n);
                          gamma = f.epsilon + ctx.tau;
                          modulus_bound = [ctx](double u) { return f_hat2(ctx, u); };
                        },
                        [&](const IidTail& t) {
                          if (t.m < 1) throw DomainError("tail threshold m must be >= 1");
                          gamma = t.epsilon + 1.0 / std::sqrt(static_cast<double>(t.m));
                          modulus_bound = [eps = t.epsilon, m = t.m](double u) {
                            return f_hat3(eps, m, u);
                          };
                        }},
             mode);
  const auto bp = branch_points(gamma);

  auto record = [&](int i, const QuadResult& r, double scale) {
    out.integrals[i] = scale * r.value;
    out.errors[i] = scale * r.error;
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
  };

  // I1: CF-difference majorant against |K| on [-U0, U0].
  {
    std::vector<double> pts{0.0, u0};
    for (double x : inner_breaks) {
      if (x > 0.0 && x < u0) pts.insert(pts.end() - 1, x);
    }
    auto f = [&](double u) { return kernel_weight(u, big_u) * delta_bound(u); };
    auto r = integrate(f, std::span<const double>(pts), opt);
    r.error += nested_sup * u0;
    record(0, r, 2.0);
  }
  // I2: CF-modulus majorant against |K| on U0 < |u| <= U.
  if (big_u > u0) {
    const auto pts = break_points(u0, big_u, {bp.cubic_end, bp.cosine_end});
    auto f = [&](double u) { return kernel_weight(u, big_u) * modulus_bound(u); };
    record(1, integrate(f, std::span<const double>(pts), opt), 2.0);
  }
  // I3: kernel against the Gaussian on [-U0, U0].
  {
    auto f = [&](double u) { return integral3_integrand(u, big_u); };
    record(2, integrate(f, 0.0, u0, opt), 2.0);
  }
  // I4: Gaussian tail, already doubled.
  record(3, integral4(u0, params.truncation, params.quad_tol), 1.0);

  double sum = 0.0;
  double err = 0.0;
  for (int i = 0; i < 4; ++i) {
    sum += out.integrals[i];
    err += out.errors[i];
  }
  out.dstar = sum / eps;
  out.margin = err / eps;
  return out;
}

}  // namespace beccert
