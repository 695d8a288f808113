#pragma once

namespace beccert {

/// Dawson integral exp(-x^2) * int_0^x exp(s^2) ds.
double dawson(double x);

/// exp(-T^2/2) * int_0^T (s^2/2) exp(s^2/2) ds = T/2 - Daw(T/sqrt2)/sqrt2,
/// evaluated without cancellation for small T.
double damped_s2_integral(double t);

}  // namespace beccert
