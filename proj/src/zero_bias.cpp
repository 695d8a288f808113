#include "beccert/zero_bias.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace beccert {

namespace {

constexpr double kCdfTol = 1e-12;

// Integral of |h| over an interval of width w where h is linear from h0 to h1.
double abs_linear_area(double h0, double h1, double w) {
  if ((h0 >= 0.0 && h1 >= 0.0) || (h0 <= 0.0 && h1 <= 0.0)) {
    return 0.5 * w * (std::abs(h0) + std::abs(h1));
  }
  // one sign change, at fraction |h0| / (|h0| + |h1|)
  return 0.5 * w * (h0 * h0 + h1 * h1) / (std::abs(h0) + std::abs(h1));
}

std::vector<double> merged_breakpoints(std::span<const double> a,
                                       std::span<const double> b) {
  std::vector<double> xs;
  xs.reserve(a.size() + b.size());
  xs.insert(xs.end(), a.begin(), a.end());
  xs.insert(xs.end(), b.begin(), b.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

void require_centered(const DiscreteDistribution& d) {
  const auto m = moments(d);
  double scale = 1.0;
  for (double x : d.atoms()) scale = std::max(scale, std::abs(x));
  if (std::abs(m.mean) > 1e-12 * scale) {
    throw DomainError("zero-bias transform needs a centered law, mean = " +
                      std::to_string(m.mean));
  }
  if (!(m.variance > 0.0)) {
    throw DomainError("zero-bias transform needs positive variance");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// PiecewiseLinearCdf

PiecewiseLinearCdf::PiecewiseLinearCdf(std::vector<double> breakpoints,
                                       std::vector<double> values)
    : xs_(std::move(breakpoints)), ys_(std::move(values)) {
  if (xs_.size() < 2 || xs_.size() != ys_.size()) {
    throw DomainError("piecewise-linear CDF needs >= 2 matching breakpoints");
  }
  if (std::abs(ys_.front()) > kCdfTol || std::abs(ys_.back() - 1.0) > kCdfTol) {
    throw DomainError("piecewise-linear CDF must run from 0 to 1");
  }
  ys_.front() = 0.0;
  ys_.back() = 1.0;
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    if (xs_[i] < xs_[i - 1]) throw DomainError("breakpoints must be sorted");
    if (ys_[i] < ys_[i - 1] - kCdfTol) {
      throw DomainError("CDF values must be nondecreasing");
    }
    ys_[i] = std::clamp(ys_[i], ys_[i - 1], 1.0);
  }
}

double PiecewiseLinearCdf::operator()(double x) const {
  if (x < xs_.front()) return 0.0;
  if (x >= xs_.back()) return 1.0;
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
  const std::size_t i = j - 1;
  return ys_[i] + (ys_[j] - ys_[i]) * (x - xs_[i]) / (xs_[j] - xs_[i]);
}

double PiecewiseLinearCdf::left_limit(double x) const {
  if (x <= xs_.front()) return 0.0;
  if (x > xs_.back()) return 1.0;
  const auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
  const std::size_t i = j - 1;
  return ys_[i] + (ys_[j] - ys_[i]) * (x - xs_[i]) / (xs_[j] - xs_[i]);
}

// ---------------------------------------------------------------------------
// StepCdf

StepCdf::StepCdf(const DiscreteDistribution& d)
    : jumps_(d.atoms().begin(), d.atoms().end()) {
  double acc = 0.0;
  for (double p : d.probs()) {
    acc += p;
    cum_.push_back(acc);
  }
  cum_.back() = 1.0;
}

double StepCdf::operator()(double x) const {
  const auto it = std::upper_bound(jumps_.begin(), jumps_.end(), x);
  if (it == jumps_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - jumps_.begin()) - 1];
}

PiecewiseLinearCdf StepCdf::as_piecewise_linear() const {
  std::vector<double> xs;
  std::vector<double> ys;
  double before = 0.0;
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    xs.push_back(jumps_[k]);
    ys.push_back(before);
    xs.push_back(jumps_[k]);
    ys.push_back(cum_[k]);
    before = cum_[k];
  }
  return PiecewiseLinearCdf(std::move(xs), std::move(ys));
}

// ---------------------------------------------------------------------------
// density and CDF of W*

double PiecewiseConstantDensity::operator()(double x) const {
  if (knots.empty() || x < knots.front() || x >= knots.back()) return 0.0;
  const auto it = std::upper_bound(knots.begin(), knots.end(), x);
  return heights[static_cast<std::size_t>(it - knots.begin()) - 1];
}

double PiecewiseConstantDensity::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < heights.size(); ++i) {
    s += heights[i] * (knots[i + 1] - knots[i]);
  }
  return s;
}

PiecewiseConstantDensity zero_bias_density(const DiscreteDistribution& d) {
  require_centered(d);
  const auto xs = d.atoms();
  const auto ps = d.probs();
  const std::size_t n = xs.size();

  double second = 0.0;
  for (std::size_t i = 0; i < n; ++i) second += ps[i] * xs[i] * xs[i];

  // upper[i] = sum_{k > i} p_k x_k ; lower[i] = -sum_{k <= i} p_k x_k. Equal
  // for a centered law; the one summing fewer cancelling terms is used.
  std::vector<double> upper(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;) upper[i] = upper[i + 1] + ps[i + 1] * xs[i + 1];
  PiecewiseConstantDensity out;
  out.knots.assign(xs.begin(), xs.end());
  double lower = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    lower -= ps[i] * xs[i];
    const double mid = 0.5 * (xs[i] + xs[i + 1]);
    const double tail = mid >= 0.0 ? upper[i] : lower;
    out.heights.push_back(std::max(tail, 0.0) / second);
  }
  return out;
}

PiecewiseLinearCdf zero_bias_cdf(const DiscreteDistribution& d) {
  const auto dens = zero_bias_density(d);
  const double total = dens.integral();
  std::vector<double> ys{0.0};
  double acc = 0.0;
  for (std::size_t i = 0; i < dens.heights.size(); ++i) {
    acc += dens.heights[i] * (dens.knots[i + 1] - dens.knots[i]);
    ys.push_back(acc / total);
  }
  ys.back() = 1.0;
  return PiecewiseLinearCdf(dens.knots, std::move(ys));
}

// ---------------------------------------------------------------------------
// metrics

double kappa1(const PiecewiseLinearCdf& f, const PiecewiseLinearCdf& g) {
  const auto xs = merged_breakpoints(f.breakpoints(), g.breakpoints());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double u = xs[i];
    const double v = xs[i + 1];
    const double h0 = f(u) - g(u);
    const double h1 = f.left_limit(v) - g.left_limit(v);
    area += abs_linear_area(h0, h1, v - u);
  }
  return area;
}

double kappa1(const StepCdf& f, const PiecewiseLinearCdf& g) {
  return kappa1(f.as_piecewise_linear(), g);
}

double kappa1(const StepCdf& f, const StepCdf& g) {
  return kappa1(f.as_piecewise_linear(), g.as_piecewise_linear());
}

double sup_distance(const PiecewiseLinearCdf& f, const PiecewiseLinearCdf& g) {
  double worst = 0.0;
  for (double x : merged_breakpoints(f.breakpoints(), g.breakpoints())) {
    worst = std::max({worst, std::abs(f(x) - g(x)),
                      std::abs(f.left_limit(x) - g.left_limit(x))});
  }
  return worst;
}

double zero_bias_gap(const DiscreteDistribution& d) {
  if (!is_standardized(d)) {
    throw DomainError("zero_bias_gap needs a standardized law");
  }
  return 0.5 * moments(d).beta3 - kappa1(StepCdf(d), zero_bias_cdf(d));
}

// ---------------------------------------------------------------------------
// three-point laws

bool ThreePointParams::feasible() const {
  return a * c >= 1.0 && b * c <= 1.0;
}

DiscreteDistribution ThreePointParams::distribution() const {
  if (b == 0.0 && q <= 0.0) {
    return DiscreteDistribution({-a, c}, {p, r});
  }
  return DiscreteDistribution({-a, -b, c}, {p, q, r});
}

ThreePointParams threepoint_params(double a, double b, double c) {
  if (!(a > b && b >= 0.0 && c > 0.0)) {
    throw DomainError("three-point values need a > b >= 0 and c > 0");
  }
  ThreePointParams t;
  t.a = a;
  t.b = b;
  t.c = c;
  t.delta = (a + c) * (b + c) * (a - b);
  t.p = (1.0 - b * c) * (c + b) / t.delta;
  t.q = (a * c - 1.0) * (a + c) / t.delta;
  t.r = (a * b + 1.0) * (a - b) / t.delta;
  return t;
}

double threepoint_case_a(const ThreePointParams& t) {
  return t.r / t.c - t.p * t.a * t.a * t.a - t.q * t.b * t.b * t.b;
}

double threepoint_case_b(const ThreePointParams& t) {
  const double s = t.a - t.b - 1.0 / t.a;
  return t.p * t.a * s * s + threepoint_case_a(t);
}

double threepoint_case_c(const ThreePointParams& t) {
  return t.p / t.a - t.r * t.c * t.c * t.c;
}

ThreePointValue threepoint_g(double a, double b, double c) {
  const auto t = threepoint_params(a, b, c);
  if (!t.feasible()) {
    throw DomainError("infeasible three-point values (need ac >= 1, bc <= 1)");
  }
  const double left = a * (a - b);
  const double right = c * (b + c);
  // Where two case conditions hold at once the expressions coincide; case B
  // takes precedence on shared boundaries.
  if (left >= 1.0 && right >= 1.0) return {threepoint_case_b(t), ThreePointCase::B};
  if (left <= 1.0) return {threepoint_case_a(t), ThreePointCase::A};
  return {threepoint_case_c(t), ThreePointCase::C};
}

// ---------------------------------------------------------------------------
// sums

NormalizedSum normalized_sum(std::span<const DiscreteDistribution> ds) {
  if (ds.empty()) throw DomainError("need at least one summand");
  double var = 0.0;
  for (const auto& d : ds) {
    const auto m = moments(d);
    double scale = 1.0;
    for (double x : d.atoms()) scale = std::max(scale, std::abs(x));
    if (std::abs(m.mean) > 1e-12 * scale) {
      throw DomainError("summands must be centered");
    }
    var += m.variance;
  }
  if (!(var > 0.0)) throw DomainError("summands have zero total variance");
  const double inv_sigma = 1.0 / std::sqrt(var);

  NormalizedSum out{{}, DiscreteDistribution::point_mass(0.0), 0.0};
  for (const auto& d : ds) {
    out.summands.push_back(d.scaled(inv_sigma));
    out.lyapunov += moments(out.summands.back()).beta3;
  }
  out.sum = out.summands.front();
  for (std::size_t i = 1; i < out.summands.size(); ++i) {
    out.sum = convolve(out.sum, out.summands[i]);
  }
  return out;
}

PiecewiseLinearCdf mixture_zero_bias_sum(std::span<const DiscreteDistribution> ds) {
  const auto ns = normalized_sum(ds);
  const std::size_t n = ns.summands.size();

  struct Component {
    double weight;
    DiscreteDistribution rest;
    PiecewiseLinearCdf starred;
  };
  std::vector<Component> parts;
  std::vector<double> xs;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = moments(ns.summands[k]).variance;
    if (!(w > 0.0)) continue;
    DiscreteDistribution rest = DiscreteDistribution::point_mass(0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != k) rest = convolve(rest, ns.summands[j]);
    }
    auto starred = zero_bias_cdf(ns.summands[k]);
    for (double y : rest.atoms()) {
      for (double bp : starred.breakpoints()) xs.push_back(y + bp);
    }
    parts.push_back({w, std::move(rest), std::move(starred)});
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<double> ys;
  ys.reserve(xs.size());
  for (double x : xs) {
    double v = 0.0;
    for (const auto& part : parts) {
      double inner = 0.0;
      for (std::size_t i = 0; i < part.rest.size(); ++i) {
        inner += part.rest.probs()[i] * part.starred(x - part.rest.atoms()[i]);
      }
      v += part.weight * inner;
    }
    ys.push_back(v);
  }
  return PiecewiseLinearCdf(std::move(xs), std::move(ys));
}

double zeta3_ratio_lower(double p) {
  const auto m = moments(DiscreteDistribution::two_point(p));
  return std::abs(m.mu3) / (6.0 * m.beta3);
}

}  // namespace beccert
