#pragma once

namespace tpx {

// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
double incomplete_beta(double a, double b, double x);

// CDF of Student's t distribution with df degrees of freedom.
double student_t_cdf(double t, double df);

// Student-t quantile for the measurement stopping rule, computed by numerical
// inversion of the regularized incomplete beta function. By default alpha is
// read as a two-sided confidence level (cumulative probability
// 1 - (1-alpha)/2); one_sided selects the plain alpha quantile.
double t_critical(double alpha, double df, bool one_sided = false);

}  // namespace tpx
