#pragma once

namespace sysmdp::special {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// Regularized lower incomplete gamma P(a, x) for a > 0 and x >= 0.
double incomplete_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed without cancellation.
double incomplete_gamma_q(double a, double x);

/// Student-t CDF with `dof` > 0 (non-integer allowed).
double t_cdf(double t, double dof);

/// Upper tail 1 - F_t(t), accurate far into the tail.
double t_sf(double t, double dof);

double chi2_cdf(double x, double dof);
double chi2_sf(double x, double dof);

double normal_cdf(double z);
double normal_sf(double z);

}  // namespace sysmdp::special
