#pragma once

namespace covpen::special {

/// Regularized incomplete beta function I_x(a, b), evaluated by Lentz's
/// continued fraction.
double incomplete_beta(double a, double b, double x);

/// CDF of Student's t with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// Two-sided tail Pr(|T| > t) for t >= 0.
double student_t_two_sided(double t, double dof);

/// Quantile of Student's t: Newton iteration on the CDF, safeguarded by
/// bisection, to 1e-10 absolute in probability.
double student_t_quantile(double p, double dof);

}  // namespace covpen::special
