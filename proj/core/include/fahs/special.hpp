#pragma once

// Scalar special functions used across the toolkit: the standard normal
// CDF/quantile pair, the Student-t CDF and the regularized incomplete beta
// behind it. All of them are accurate to ~1e-12 relative or better inside
// (1e-15, 1-1e-15); quantiles are evaluated tail-side so extreme inputs do
// not saturate.

namespace fahs {

// Standard normal density.
double normal_pdf(double x);

// Normal density with mean mu and standard deviation sd.
double normal_pdf(double x, double mu, double sd);

// P(Z <= x) for Z ~ N(0,1).
double normal_cdf(double x);

// Upper tail P(Z > x); precise for large x (no 1 - cdf cancellation).
double normal_sf(double x);

// Inverse of normal_cdf on (0,1). Rational initial guess plus Newton
// polishing against the erfc-based CDF.
double normal_quantile(double p);

// Two-sided p-value of a z-score under N(0,1): 2 * (1 - Phi(|z|)).
// Throws domain_error on non-finite input.
double two_sided_p(double z);

// Regularized incomplete beta I_x(a, b) via Lentz continued fraction.
double incomplete_beta(double a, double b, double x);

// Student-t CDF with `df` degrees of freedom. Throws domain_error if df <= 0.
double student_t_cdf(double t, double df);

// Upper tail P(T > t); exploits symmetry, precise in both tails.
double student_t_sf(double t, double df);

// Density of the standard half-Cauchy distribution on (0, inf).
double half_cauchy_pdf(double x);

}  // namespace fahs
