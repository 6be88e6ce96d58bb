#include "fahs/prior_data_conflict.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "fahs/errors.hpp"
#include "fahs/rng.hpp"
#include "fahs/special.hpp"

namespace fahs {

namespace {

double observed_mean(const ObservationVector& y) {
    return std::accumulate(y.values.begin(), y.values.end(), 0.0) /
           static_cast<double>(y.size());
}

PdcResult check_once(double ybar, double xi, double sigma_diag, double sigma_offdiag,
                     double threshold, Pcg32& rng, std::size_t m) {
    std::vector<double> eta(m);
    for (auto& e : eta) e = half_cauchy_draw(rng);
    const double variance = prior_predictive_variance(xi, eta, sigma_diag, sigma_offdiag, m);

    PdcResult result;
    result.ybar = ybar;
    result.predictive_sd = std::sqrt(variance);
    result.tail_probability = pdc_tail_probability(ybar, result.predictive_sd);
    result.threshold = threshold;
    result.conflict = result.tail_probability < threshold;
    return result;
}

}  // namespace

double prior_predictive_variance(double xi, const std::vector<double>& eta,
                                 double sigma_diag, double sigma_offdiag, std::size_t m) {
    if (m == 0 || eta.size() != m)
        throw dimension_error("prior_predictive_variance: eta must have length m");
    const double md = static_cast<double>(m);
    double sum_eta_sq = 0.0;
    for (double e : eta) sum_eta_sq += e * e;
    const double prior_term = sigma_diag * sigma_diag * xi * xi * sum_eta_sq / (md * md);
    const double noise_term =
        (sigma_diag * sigma_diag + (md - 1.0) * sigma_offdiag * sigma_offdiag) / md;
    const double variance = prior_term + noise_term;
    if (!(variance > 0.0) || !std::isfinite(variance))
        throw domain_error("prior_predictive_variance: nonpositive variance " +
                           std::to_string(variance));
    return variance;
}

double pdc_tail_probability(double ybar, double predictive_sd) {
    if (!(predictive_sd > 0.0))
        throw domain_error("pdc_tail_probability: predictive_sd must be positive");
    return two_sided_p(ybar / predictive_sd);
}

PdcResult pdc_check(const ObservationVector& y, double xi, double sigma_diag,
                    double sigma_offdiag, double threshold, std::uint64_t seed) {
    if (!(threshold >= 0.0 && threshold < 1.0))
        throw config_error("pdc_check: threshold must lie in [0,1)");
    Pcg32 rng(seed, 0);
    return check_once(observed_mean(y), xi, sigma_diag, sigma_offdiag, threshold, rng,
                      y.size());
}

PdcResult pdc_check_averaged(const ObservationVector& y, double xi, double sigma_diag,
                             double sigma_offdiag, double threshold, std::uint64_t seed,
                             int draws) {
    if (!(threshold >= 0.0 && threshold < 1.0))
        throw config_error("pdc_check_averaged: threshold must lie in [0,1)");
    if (draws < 1) throw config_error("pdc_check_averaged: draws must be >= 1");

    const double ybar = observed_mean(y);
    double mean_tail = 0.0;
    double mean_sd = 0.0;
    for (int k = 0; k < draws; ++k) {
        Pcg32 rng(seed, static_cast<std::uint64_t>(k));
        const PdcResult one =
            check_once(ybar, xi, sigma_diag, sigma_offdiag, threshold, rng, y.size());
        mean_tail += one.tail_probability;
        mean_sd += one.predictive_sd;
    }
    PdcResult result;
    result.ybar = ybar;
    result.predictive_sd = mean_sd / draws;
    result.tail_probability = mean_tail / draws;
    result.threshold = threshold;
    result.conflict = result.tail_probability < threshold;
    return result;
}

}  // namespace fahs
