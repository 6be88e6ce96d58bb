#pragma once

// Independent oracles for the test suites. Everything here deliberately
// avoids the library's own numeric paths: special functions come from GSL,
// the horseshoe posterior mean from a tanh-sinh rule in the kappa variable
// (the library integrates an atan-substituted integrand with adaptive
// Simpson), and BH from literal brute force over all candidate thresholds.

#include <cstddef>
#include <vector>

namespace oracle {

// GSL-backed special functions.
double normal_cdf(double x);
double normal_quantile(double p);
double student_t_cdf(double t, double df);
double student_t_sf(double t, double df);

// E(kappa | y, xi) and E(beta | y, xi) for the horseshoe with sigma^2 = 1 and
// fixed xi, by tanh-sinh quadrature over kappa in (0,1).
double posterior_kappa(double y, double xi);
double posterior_beta_mean(double y, double xi);

// Brute-force BH: try every k and apply the step-up definition literally.
std::vector<bool> bh_bruteforce(const std::vector<double>& p, double gamma);

// One-sample Kolmogorov-Smirnov against Uniform(0,1): statistic and the
// asymptotic p-value with the small-sample correction.
double ks_statistic_uniform(std::vector<double> values);
double ks_pvalue(double statistic, std::size_t n);

}  // namespace oracle
