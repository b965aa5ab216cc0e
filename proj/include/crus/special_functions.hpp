#pragma once

namespace crus::special {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
double chi_square_sf(double x, double df);

double normal_cdf(double z);
/// Upper tail 1 - Phi(z).
double normal_sf(double z);
/// Inverse of the standard normal CDF, p in (0, 1).
double normal_quantile(double p);

}  // namespace crus::special
