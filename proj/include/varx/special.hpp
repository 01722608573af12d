#pragma once

namespace varx {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed without
/// cancellation.
double gamma_q(double a, double x);

/// Chi-square CDF with k degrees of freedom: P(k/2, x/2).
/// Throws DomainError for x < 0 or k < 1.
double chi2_cdf(double x, int k);
/// Upper tail 1 - chi2_cdf(x, k).
double chi2_sf(double x, int k);

}  // namespace varx
