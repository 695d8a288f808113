#pragma once

#include <span>
#include <vector>

#include "beccert/distribution.hpp"

namespace beccert {

/// Continuous CDF that is linear between breakpoints, 0 before the first and
/// 1 after the last. Repeated breakpoints encode a jump, so step CDFs embed
/// into this type exactly.
class PiecewiseLinearCdf {
 public:
  PiecewiseLinearCdf(std::vector<double> breakpoints, std::vector<double> values);

  std::span<const double> breakpoints() const { return xs_; }
  std::span<const double> values() const { return ys_; }

  /// Right-continuous value F(x).
  double operator()(double x) const;
  /// Left limit F(x-).
  double left_limit(double x) const;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// Staircase CDF of a discrete law.
class StepCdf {
 public:
  explicit StepCdf(const DiscreteDistribution& d);

  std::span<const double> jumps() const { return jumps_; }
  std::span<const double> cumulative() const { return cum_; }

  double operator()(double x) const;
  PiecewiseLinearCdf as_piecewise_linear() const;

 private:
  std::vector<double> jumps_;
  std::vector<double> cum_;
};

/// Piecewise-constant density: heights[i] on [knots[i], knots[i+1]).
struct PiecewiseConstantDensity {
  std::vector<double> knots;
  std::vector<double> heights;

  double operator()(double x) const;
  double integral() const;
};

/// Density of W* for a centered discrete W with positive variance. Between
/// consecutive atoms it equals E(W 1{W > w}) / Var W.
PiecewiseConstantDensity zero_bias_density(const DiscreteDistribution& d);
PiecewiseLinearCdf zero_bias_cdf(const DiscreteDistribution& d);

/// Mean metric: integral of |F - G|, exact for piecewise-linear CDFs.
double kappa1(const PiecewiseLinearCdf& f, const PiecewiseLinearCdf& g);
double kappa1(const StepCdf& f, const PiecewiseLinearCdf& g);
double kappa1(const StepCdf& f, const StepCdf& g);

/// sup_x |F(x) - G(x)|.
double sup_distance(const PiecewiseLinearCdf& f, const PiecewiseLinearCdf& g);

/// E|W|^3 / 2 - kappa1(W, W*) for a standardized W. Never below -1e-10.
double zero_bias_gap(const DiscreteDistribution& d);

/// Standardized law on {-a, -b, c} determined by the two moment constraints.
struct ThreePointParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double p = 0.0;  ///< mass at -a
  double q = 0.0;  ///< mass at -b
  double r = 0.0;  ///< mass at c
  double delta = 0.0;

  /// a c >= 1 and b c <= 1; otherwise p, q, r are not all nonnegative.
  bool feasible() const;
  DiscreteDistribution distribution() const;
};

/// Throws DomainError unless a > b >= 0 and c > 0. Infeasible triples are
/// returned with feasible() == false.
ThreePointParams threepoint_params(double a, double b, double c);

enum class ThreePointCase { A, B, C };

struct ThreePointValue {
  double g = 0.0;
  ThreePointCase which = ThreePointCase::A;
};

/// kappa1(W, W*) - E|W|^3 / 2 via the closed case formulas.
/// Throws DomainError for infeasible triples.
ThreePointValue threepoint_g(double a, double b, double c);

/// The three case expressions, exposed so seams can be checked.
double threepoint_case_a(const ThreePointParams& t);
double threepoint_case_b(const ThreePointParams& t);
double threepoint_case_c(const ThreePointParams& t);

/// Sum of independent centered summands, jointly scaled to unit variance.
struct NormalizedSum {
  std::vector<DiscreteDistribution> summands;  ///< X_j / sigma
  DiscreteDistribution sum;                    ///< S_n
  double lyapunov = 0.0;                       ///< epsilon_n
};

NormalizedSum normalized_sum(std::span<const DiscreteDistribution> ds);

/// CDF of S_n* as the sigma_k^2-weighted mixture of the laws of S_n with the
/// k-th summand replaced by its zero-biased copy.
PiecewiseLinearCdf mixture_zero_bias_sum(std::span<const DiscreteDistribution> ds);

/// |E W^3| / (6 E|W|^3) for the standardized two-point law with weight p.
double zeta3_ratio_lower(double p);

}  // namespace beccert
