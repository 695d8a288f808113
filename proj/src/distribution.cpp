#include "beccert/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

namespace beccert {

namespace {

constexpr double kMergeTol = 1e-12;
constexpr double kNormalizeTol = 1e-9;

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> atoms,
                                           std::vector<double> probs) {
  if (atoms.empty() || atoms.size() != probs.size()) {
    throw DomainError("distribution needs equally many atoms and probs (>0)");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!std::isfinite(atoms[i]) || !std::isfinite(probs[i])) {
      throw DomainError("non-finite atom or probability");
    }
    if (probs[i] < -1e-12) {
      throw DomainError("negative probability " + std::to_string(probs[i]));
    }
    if (i > 0 && !(atoms[i] > atoms[i - 1])) {
      throw DomainError("atoms must be strictly increasing");
    }
    total += std::max(probs[i], 0.0);
  }
  if (std::abs(total - 1.0) > kNormalizeTol) {
    throw DomainError("probabilities sum to " + std::to_string(total));
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double p = std::max(probs[i], 0.0) / total;
    if (p > 0.0) {
      atoms_.push_back(atoms[i]);
      probs_.push_back(p);
    }
  }
}

DiscreteDistribution DiscreteDistribution::point_mass(double x) {
  return DiscreteDistribution({x}, {1.0});
}

DiscreteDistribution DiscreteDistribution::rademacher() {
  return DiscreteDistribution({-1.0, 1.0}, {0.5, 0.5});
}

DiscreteDistribution DiscreteDistribution::two_point(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("two_point needs 0 < p < 1");
  }
  const double q = 1.0 - p;
  return DiscreteDistribution({-std::sqrt(q / p), std::sqrt(p / q)}, {p, q});
}

DiscreteDistribution DiscreteDistribution::scaled(double c) const {
  if (!(c > 0.0)) throw DomainError("scale factor must be positive");
  std::vector<double> xs(atoms_);
  for (auto& x : xs) x *= c;
  return DiscreteDistribution(Unchecked{}, std::move(xs), probs_);
}

MomentSummary moments(const DiscreteDistribution& d) {
  MomentSummary m;
  const auto xs = d.atoms();
  const auto ps = d.probs();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    m.mean += ps[i] * xs[i];
    m.beta3 += ps[i] * std::abs(xs[i]) * xs[i] * xs[i];
    m.mu3 += ps[i] * xs[i] * xs[i] * xs[i];
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double c = xs[i] - m.mean;
    m.variance += ps[i] * c * c;
  }
  return m;
}

double fourth_moment(const DiscreteDistribution& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double x2 = d.atoms()[i] * d.atoms()[i];
    s += d.probs()[i] * x2 * x2;
  }
  return s;
}

bool is_standardized(const DiscreteDistribution& d, double tol) {
  const auto m = moments(d);
  return std::abs(m.mean) <= tol && std::abs(m.variance - 1.0) <= tol;
}

DiscreteDistribution standardize(const DiscreteDistribution& d) {
  const auto m = moments(d);
  if (!(m.variance > 0.0)) {
    throw DomainError("cannot standardize a zero-variance law");
  }
  const double s = std::sqrt(m.variance);
  std::vector<double> xs(d.atoms().begin(), d.atoms().end());
  for (auto& x : xs) x = (x - m.mean) / s;
  return DiscreteDistribution(std::move(xs),
                              {d.probs().begin(), d.probs().end()});
}

DiscreteDistribution convolve(const DiscreteDistribution& d1,
                              const DiscreteDistribution& d2) {
  std::vector<std::pair<double, double>> sums;
  sums.reserve(d1.size() * d2.size());
  for (std::size_t i = 0; i < d1.size(); ++i) {
    for (std::size_t j = 0; j < d2.size(); ++j) {
      sums.emplace_back(d1.atoms()[i] + d2.atoms()[j],
                        d1.probs()[i] * d2.probs()[j]);
    }
  }
  std::sort(sums.begin(), sums.end());

  std::vector<double> xs;
  std::vector<double> ps;
  double group_start = 0.0;
  for (const auto& [x, p] : sums) {
    if (!xs.empty() && x - group_start <= kMergeTol) {
      ps.back() += p;
      continue;
    }
    group_start = x;
    xs.push_back(x);
    ps.push_back(p);
  }
  return DiscreteDistribution(DiscreteDistribution::Unchecked{}, std::move(xs),
                              std::move(ps));
}

DiscreteDistribution convolve_power(const DiscreteDistribution& d, int k) {
  if (k < 1) throw DomainError("convolution power must be >= 1");
  DiscreteDistribution acc = d;
  for (int i = 1; i < k; ++i) acc = convolve(acc, d);
  return acc;
}

std::complex<double> cf(const DiscreteDistribution& d, double t) {
  std::complex<double> s{0.0, 0.0};
  for (std::size_t i = 0; i < d.size(); ++i) {
    s += d.probs()[i] * std::polar(1.0, t * d.atoms()[i]);
  }
  return s;
}

std::complex<double> zero_bias_cf(const DiscreteDistribution& d, double t) {
  if (!is_standardized(d)) {
    throw DomainError("zero_bias_cf needs a standardized law");
  }
  if (t == 0.0) return {1.0, 0.0};
  if (std::abs(t) < 1e-8) {
    // -f'(t)/t = E W^2 + i t E W^3 / 2 - t^2 E W^4 / 6 + O(t^3)
    const auto m = moments(d);
    const double m2 = m.variance + m.mean * m.mean;
    return {m2 - t * t * fourth_moment(d) / 6.0, t * m.mu3 / 2.0};
  }
  // f'(t) = i * sum p x e^{itx}
  std::complex<double> s{0.0, 0.0};
  for (std::size_t i = 0; i < d.size(); ++i) {
    s += d.probs()[i] * d.atoms()[i] * std::polar(1.0, t * d.atoms()[i]);
  }
  const std::complex<double> fprime = std::complex<double>(0.0, 1.0) * s;
  return -fprime / t;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

double kolmogorov_vs_normal(const DiscreteDistribution& d) {
  double below = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double phi = normal_cdf(d.atoms()[i]);
    const double after = below + d.probs()[i];
    worst = std::max({worst, std::abs(below - phi), std::abs(after - phi)});
    below = after;
  }
  return worst;
}

}  // namespace beccert
