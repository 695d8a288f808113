#pragma once

#include <optional>

#include "beccert/quadrature.hpp"

namespace beccert {

/// The triple behind b(t, gamma).
///   a = max_{x>0} (cos x - 1 + x^2/2) / x^3, attained at x = M;
///   l = inf_{t>=0} exp(-t^2/2 + 2 a t^3), attained at t = 1/(6a).
struct BoundConstants {
  double a = 0.0;
  double M = 0.0;
  double l = 0.0;

  /// Recomputes the constants from their definitions (root of the
  /// derivative for M, closed form exp(-1/(216 a^2)) for l).
  static BoundConstants compute();
  /// Process-wide instance, computed once.
  static const BoundConstants& get();
};

/// Three-branch majorant of log |f|^2 style quantities:
///   -t^2 + 2 gamma a |t|^3            if gamma|t| < M
///   -2 (1 - cos(gamma t)) / gamma^2   if M <= gamma|t| <= 2 pi
///   0                                 if gamma|t| > 2 pi
/// Throws DomainError for gamma <= 0.
double b(double t, double gamma);

/// Points where b(., gamma) switches branch, as |t| values.
struct BranchPoints {
  double cubic_end;   ///< M / gamma
  double cosine_end;  ///< 2 pi / gamma
};
BranchPoints branch_points(double gamma);

/// exp(b(t, 2 eps) / 2).
double f_hat1(double epsilon, double t);
/// eps * (|t|/2 - Daw(|t|/sqrt2)/sqrt2).
double delta_hat1(double epsilon, double t);
/// Two-branch majorant switching at A = eps^{-1/3} / (6a); closed form.
double delta_hat2(double epsilon, double t);
/// The |t| > A branch with (1/6a)^2/2 in place of (1/6a)/2. Kept only so
/// selfcheck can report how far that variant is from the integral definition.
double delta_hat2_as_printed(double epsilon, double t);

/// Seam A = eps^{-1/3} / (6a) of delta_hat2.
double delta_hat2_seam(double epsilon);

/// Defining integrals of delta_hat1 / delta_hat2 evaluated by quadrature.
QuadResult delta_hat1_quadrature(double epsilon, double t, const QuadOptions& opt = {});
QuadResult delta_hat2_quadrature(double epsilon, double t, const QuadOptions& opt = {});

/// Identically distributed summands: epsilon_n = beta / sqrt(n), tau_n = 1/sqrt(n).
struct IidContext {
  double epsilon = 0.0;
  int n = 1;
  int m = 1;
  double tau = 1.0;

  /// Validates epsilon * sqrt(n) >= 1, n >= 1, m >= 1.
  static IidContext make(double epsilon, int n, int m = 1);
};

/// (1 + b(t, eps + 1/sqrt n) / n)^{n/2}, base clamped at 0.
double f_hat2(const IidContext& ctx, double t);
/// exp(b(t, eps + 1/sqrt m) / 2).
double f_hat3(double epsilon, int m, double t);
/// eps phi(t) int_0^|t| (1 + b(s, eps + 1/sqrt n)/n)^{(n-1)/2} (s^2/2) e^{s^2/2} ds.
QuadResult delta_hat3(const IidContext& ctx, double t, const QuadOptions& opt = {});
/// eps phi(t) int_0^|t| exp((m-1)/(2m) b(s, eps + 1/sqrt m) + s^2/2) (s^2/2) ds.
QuadResult delta_hat4(double epsilon, int m, double t, const QuadOptions& opt = {});

/// Analytic small-epsilon regime: worst-case D-value (bound / eps) from the
/// auxiliary inequality with constants 0.27283, 0.19948, 0.09116, 0.00095.
/// Empty when the inequality's validity condition eps_hat + eps' <= 0.2
/// fails or the substitution is undefined.
std::optional<double> small_eps_bound_general(double epsilon);
std::optional<double> small_eps_bound_iid(double epsilon);

/// ceil(1 / eps^2): the smallest n compatible with eps_n = eps for i.i.d.
/// summands.
long min_sample_size(double epsilon);

}  // namespace beccert
