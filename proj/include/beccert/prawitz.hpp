#pragma once

#include <array>
#include <complex>
#include <string>
#include <variant>

#include "beccert/quadrature.hpp"

namespace beccert {

/// Smoothing parameters 0 < U0 <= U plus numerical settings.
struct PrawitzParams {
  double u0 = 0.0;
  double u = 0.0;
  double quad_tol = 1e-11;    ///< absolute tolerance per integral
  double truncation = 40.0;   ///< replaces +infinity in the Gaussian tail term
  QuadRule rule = QuadRule::GaussKronrod15;

  /// Throws DomainError unless 0 < u0 <= u and the settings are sane.
  void validate() const;
};

/// Arbitrary independent summands; delta <- min(delta_hat1, delta_hat2),
/// |f| <- f_hat1.
struct General {
  double epsilon;
};
/// n identically distributed summands; delta_hat3 and f_hat2.
struct IidFinite {
  double epsilon;
  int n;
};
/// Any n >= m identically distributed summands; delta_hat4 and f_hat3.
struct IidTail {
  double epsilon;
  int m;
};
using BoundMode = std::variant<General, IidFinite, IidTail>;

double mode_epsilon(const BoundMode& mode);
std::string mode_name(const BoundMode& mode);
/// Copy of `mode` with epsilon replaced.
BoundMode with_epsilon(const BoundMode& mode, double epsilon);

/// K(u) = (1-|u|)/2 + i/2 ((1-|u|) cot(pi u) + sgn(u)/pi), 0 < |u| <= 1.
/// K(+-1) = 0. Throws DomainError at u = 0 or |u| > 1.
std::complex<double> kernel_K(double u);

/// |K(u/U)/U - i/(2 pi u)| phi(u), with the removable singularity at u = 0
/// filled in by its limit 1/(2U).
double integral3_integrand(double u, double U);

/// 2 int_{U0}^{inf} phi(u) / (2 pi u) du, quadrature up to `truncation`
/// and an analytic bound on the rest folded into the error.
QuadResult integral4(double u0, double truncation = 40.0, double quad_tol = 1e-11);

struct PrawitzResult {
  double dstar = 0.0;   ///< (I1 + I2 + I3 + I4) / eps
  double margin = 0.0;  ///< accumulated numerical error, divided by eps
  std::array<double, 4> integrals{};
  std::array<double, 4> errors{};
  long evaluations = 0;
  bool converged = true;

  /// The certified value dstar + margin.
  double upper() const { return dstar + margin; }
};

/// Right-hand side of the smoothing inequality divided by eps, with the CF
/// and CF-difference majorants selected by `mode`.
PrawitzResult prawitz_rhs(const BoundMode& mode, const PrawitzParams& params);

}  // namespace beccert
