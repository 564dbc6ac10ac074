#pragma once

#include "hdlrt/errors.hpp"

namespace hdlrt {

// log Gamma(x) for x > 0. Lanczos approximation below 12, Stirling series
// above; relative error a few ulps over [0.5, 1e6].
double log_gamma(double x);

// log of the multivariate Gamma function:
//   (p(p-1)/4) log pi + sum_{i=1..p} log Gamma(a - (i-1)/2),  a > (p-1)/2.
double log_multivariate_gamma(int p, double a);

// Standard normal CDF.
double normal_cdf(double z);

// Upper tail P(chi^2_f > x) via the regularized incomplete gamma function.
// Series/continued-fraction split at x < f + 1; 1e-14 term tolerance.
double chi_square_sf(double x, double f);

// Regularized upper incomplete gamma Q(a, x), the workhorse behind
// chi_square_sf. Exposed for tests.
double regularized_gamma_q(double a, double x);

// log(1 - p/x) with log1p when the ratio is small; the quantity every CLT
// parameter in this library is built from.
double log_one_minus_ratio(double p, double x);

// A truncated asymptotic expansion next to the quantity it approximates.
// Tests pick tolerances; nothing is asserted here.
struct ExpansionResult {
  double value;      // the expansion's prediction
  double exact;      // direct evaluation
  double abs_error;  // |value - exact|
};

// Expansion of log Gamma(x+b)/Gamma(x) as b*log(x) + (b^2-b)/(2x), against the
// exact log-Gamma difference. Requires x > 0 and x + b > 0.
ExpansionResult gamma_ratio_expansion(double x, double b);

// Expansion of log Gamma_p(n/2 + t)/Gamma_p(n/2 + s) as
//   p(t-s)(log n - 1 - log 2) + r^2[(t^2-s^2) - (p - n + 1/2)(t-s)],
// with r^2 = -log(1 - p/n). Requires n > p and both arguments inside the
// multivariate Gamma domain.
ExpansionResult mvgamma_ratio_expansion(double n, int p, double t, double s);

}  // namespace hdlrt
