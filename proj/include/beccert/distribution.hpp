#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace beccert {

/// Raised when an input violates a documented precondition (non-standardized
/// law, zero variance, malformed weights, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Finitely supported probability law on the real line.
///
/// Atoms are kept strictly increasing and every stored probability is
/// positive; zero-weight atoms are dropped on construction. Weights whose sum
/// is within 1e-9 of one are renormalized, anything further off is rejected.
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<double> atoms, std::vector<double> probs);

  static DiscreteDistribution point_mass(double x);
  /// ±1 with probability 1/2 each.
  static DiscreteDistribution rademacher();
  /// Standardized two-point law: -sqrt(q/p) with probability p and
  /// sqrt(p/q) with probability q = 1 - p.
  static DiscreteDistribution two_point(double p);

  std::span<const double> atoms() const { return atoms_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return atoms_.size(); }

  /// Law of c * X.
  DiscreteDistribution scaled(double c) const;

  friend bool operator==(const DiscreteDistribution&,
                         const DiscreteDistribution&) = default;

 private:
  struct Unchecked {};
  DiscreteDistribution(Unchecked, std::vector<double> atoms,
                       std::vector<double> probs)
      : atoms_(std::move(atoms)), probs_(std::move(probs)) {}

  friend DiscreteDistribution convolve(const DiscreteDistribution&,
                                       const DiscreteDistribution&);

  std::vector<double> atoms_;
  std::vector<double> probs_;
};

/// Raw moments about zero, plus the variance about the mean.
struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;
  double beta3 = 0.0;  ///< E|W|^3
  double mu3 = 0.0;    ///< E W^3
};

MomentSummary moments(const DiscreteDistribution& d);

/// E W^4, needed only for the small-t expansion of the zero-bias CF.
double fourth_moment(const DiscreteDistribution& d);

/// True when mean and variance are within `tol` of 0 and 1.
bool is_standardized(const DiscreteDistribution& d, double tol = 1e-9);

/// (W - E W) / sqrt(Var W). Throws DomainError on zero variance.
DiscreteDistribution standardize(const DiscreteDistribution& d);

/// Law of the sum of independent draws. Sums closer than 1e-12 are merged.
DiscreteDistribution convolve(const DiscreteDistribution& d1,
                              const DiscreteDistribution& d2);

/// k-fold convolution power.
DiscreteDistribution convolve_power(const DiscreteDistribution& d, int k);

std::complex<double> cf(const DiscreteDistribution& d, double t);

/// Characteristic function of the zero-biased law, -f'(t)/t. `d` must be
/// standardized.
std::complex<double> zero_bias_cf(const DiscreteDistribution& d, double t);

double normal_cdf(double x);
double normal_pdf(double x);

/// sup_x |F(x) - Phi(x)|, attained at an atom from one side.
double kolmogorov_vs_normal(const DiscreteDistribution& d);

}  // namespace beccert
