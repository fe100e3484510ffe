#pragma once

namespace stancelab {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a, x).
double incomplete_gamma_p(double a, double x);

// Student-t distribution with df degrees of freedom.
double student_t_cdf(double t, double df);
double student_t_quantile(double p, double df);

// Upper-tail chi-square probability with k degrees of freedom.
double chi_square_sf(double x, double k);

}  // namespace stancelab
