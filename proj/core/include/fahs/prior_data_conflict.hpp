#pragma once

// Prior-data-conflict detection for the horseshoe prior under the
// equicorrelated normal means model. The sufficient statistic is the sample
// mean of y; its prior predictive is normal with variance
//   sigma_jj^2 xi^2 (sum eta_j^2)/m^2 + (sigma_jj^2 + (m-1) sigma_jk^2)/m
// for one draw of the local scales, and the two-sided tail probability of
// the observed mean flags a conflict when it falls below the threshold.

#include <cstdint>
#include <vector>

#include "fahs/model.hpp"

namespace fahs {

struct PdcResult {
    double ybar = 0.0;
    double predictive_sd = 0.0;
    double tail_probability = 1.0;
    bool conflict = false;
    double threshold = 0.05;
};

// Prior predictive variance of the mean for a given draw of local scales.
// Throws domain_error if the result is not strictly positive.
double prior_predictive_variance(double xi, const std::vector<double>& eta,
                                 double sigma_diag, double sigma_offdiag, std::size_t m);

// 2 * (1 - Phi(|ybar| / predictive_sd)).
double pdc_tail_probability(double ybar, double predictive_sd);

// Full check: one seeded half-Cauchy draw of the local scales, predictive
// variance, tail probability, verdict.
PdcResult pdc_check(const ObservationVector& y, double xi, double sigma_diag,
                    double sigma_offdiag, double threshold, std::uint64_t seed);

// Stability extension (not part of the base detector): average the tail
// probability over `draws` independent local-scale draws.
PdcResult pdc_check_averaged(const ObservationVector& y, double xi, double sigma_diag,
                             double sigma_offdiag, double threshold, std::uint64_t seed,
                             int draws = 100);

}  // namespace fahs
