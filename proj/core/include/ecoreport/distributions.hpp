#pragma once

namespace ecoreport {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// directly (continued fraction) in the upper range to avoid cancellation.
double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

/// Upper-tail probability of the chi-square distribution.
double chisq_sf(double x, double df);

/// Upper-tail probability of the F distribution. Degrees of freedom may be
/// fractional (Box's M produces a real-valued df2).
double f_sf(double x, double d1, double d2);

}  // namespace ecoreport
