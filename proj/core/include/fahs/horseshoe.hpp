#pragma once

// Gibbs sampler for the normal means model under the horseshoe prior
//
//   y_j | beta_j        ~ N(beta_j, sigma^2)
//   beta_j | eta_j, xi  ~ N(0, xi^2 eta_j^2)
//   eta_j               ~ half-Cauchy(0, 1)
//
// with the global scale xi either held fixed, given a half-Cauchy hyperprior
// (full Bayes), or estimated by maximum marginal likelihood. Half-Cauchy
// scales are sampled exactly through inverse-gamma auxiliary variables, so
// every conditional is closed form.

#include <cstdint>
#include <vector>

#include "fahs/model.hpp"

namespace fahs {

enum class XiMode { fixed, full_bayes, mmle };
enum class SigmaMode { fixed, jeffreys };

struct GibbsConfig {
    std::size_t burn_in = 1000;
    std::size_t samples = 5000;
    std::uint64_t seed = 0;
    XiMode xi_mode = XiMode::full_bayes;
    double xi_value = 0.0;  // used when xi_mode == fixed
    SigmaMode sigma_mode = SigmaMode::jeffreys;
    double sigma_sq_value = 1.0;  // used when sigma_mode == fixed
};

// Every latent quantity carried between sweeps.
struct HorseshoeChainState {
    std::vector<double> beta;
    std::vector<double> eta_sq;  // local scales squared
    std::vector<double> nu;      // auxiliaries for the eta_j
    double xi_sq = 1.0;          // global scale squared
    double zeta = 1.0;           // auxiliary for xi (full Bayes only)
    double sigma_sq = 1.0;
};

// Post-burn-in averages. kappa_j = 1/(1 + eta_j^2 xi^2) is the shrinkage
// weight, so beta_mean[j] estimates (1 - E(kappa_j | y)) y_j.
struct PosteriorSummary {
    std::vector<double> beta_mean;
    std::vector<double> kappa_mean;
    double xi_mean = 0.0;
    double sigma_sq_mean = 0.0;
};

// Run burn_in + samples sweeps and average the post-burn-in draws.
// Identical config (including seed) gives bit-identical summaries.
// Throws sampler_error (with the sweep index) if a draw goes non-finite,
// config_error on invalid configuration.
PosteriorSummary gibbs_run(const ObservationVector& y, const GibbsConfig& config);

// Marginal density m_xi(y) = \int N(y; 0, 1 + xi^2 eta^2) pi(eta) deta of one
// observation under the horseshoe prior with unit noise, by adaptive
// quadrature on the tan-substituted integrand.
double hs_marginal_density(double y, double xi);

// Sum of log marginal densities over all observations.
double hs_log_marginal(const ObservationVector& y, double xi);

// Maximum marginal likelihood estimate of xi: argmax over a 200-point
// log-spaced grid on [1/m, 1]. Throws estimation_error on quadrature failure.
double mmle_xi(const ObservationVector& y);

// Posterior mean of kappa = 1/(1 + xi^2 eta^2) given a single y with
// sigma^2 = 1 and fixed xi, by quadrature; E(beta | y, xi) = (1 - E kappa) y.
double posterior_kappa_quadrature(double y, double xi);
double posterior_beta_mean_quadrature(double y, double xi);

// Decision rule: flag beta_j as signal when |beta_mean_j| > |y_j| / 2.
// An observation of exactly zero is never rejected.
DecisionVector hs_decision(const PosteriorSummary& summary, const ObservationVector& y);

}  // namespace fahs
