#include "fahs/horseshoe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fahs/errors.hpp"
#include "fahs/quadrature.hpp"
#include "fahs/rng.hpp"
#include "fahs/special.hpp"

namespace fahs {

namespace {

constexpr double kScaleFloor = 1e-12;  // floor for eta^2, xi^2, sigma^2

void validate_config(const GibbsConfig& config) {
    if (config.samples < 1)
        throw config_error("gibbs_run: samples must be >= 1");
    if (config.xi_mode == XiMode::fixed && !(config.xi_value > 0.0))
        throw config_error("gibbs_run: fixed xi requires xi_value > 0");
    if (config.sigma_mode == SigmaMode::fixed && !(config.sigma_sq_value > 0.0))
        throw config_error("gibbs_run: fixed sigma requires sigma_sq_value > 0");
}

// Panel boundaries in u-space for integrals of
//   g(u) = f(tan u) * N(y; 0, 1 + xi^2 tan^2 u),  u in (0, pi/2).
// Besides the prior bulk near eta ~ 1, the integrand can have a ridge near
// the likelihood-optimal scale eta* = sqrt(y^2 - 1)/xi; panels bracket both.
std::vector<double> marginal_panels(double y, double xi) {
    std::vector<double> cuts{0.0};
    auto push_eta = [&](double eta) {
        if (eta > 0.0 && std::isfinite(eta)) cuts.push_back(std::atan(eta));
    };
    push_eta(0.5);
    push_eta(1.0);
    push_eta(2.0);
    const double eta_star = std::sqrt(std::max(y * y - 1.0, 0.0)) / xi;
    if (eta_star > 2.0) {
        push_eta(0.5 * eta_star);
        push_eta(eta_star);
        push_eta(2.0 * eta_star);
        push_eta(8.0 * eta_star);
    }
    cuts.push_back(0.5 * M_PI);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

template <typename G>
double integrate_panels(const G& g, const std::vector<double>& cuts) {
    // Probe each panel for the integrand scale, then integrate adaptively to
    // a tolerance relative to the global scale.
    double scale = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        for (int k = 0; k <= 8; ++k) {
            const double u = a + (b - a) * k / 8.0;
            scale = std::max(scale, std::fabs(g(u)) * (b - a));
        }
    }
    const double tol = std::max(scale * 1e-10, 1e-280);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total += adaptive_simpson(g, cuts[i], cuts[i + 1], tol);
    }
    return total;
}

}  // namespace

PosteriorSummary gibbs_run(const ObservationVector& y, const GibbsConfig& config) {
    validate_config(config);
    const std::size_t m = y.size();

    double fixed_xi = config.xi_value;
    if (config.xi_mode == XiMode::mmle) fixed_xi = mmle_xi(y);
    const bool full_bayes_xi = config.xi_mode == XiMode::full_bayes;
    const bool jeffreys_sigma = config.sigma_mode == SigmaMode::jeffreys;

    HorseshoeChainState st;
    st.beta = y.values;
    st.eta_sq.assign(m, 1.0);
    st.nu.assign(m, 1.0);
    st.xi_sq = full_bayes_xi ? 1.0 : std::max(fixed_xi * fixed_xi, kScaleFloor);
    st.zeta = 1.0;
    st.sigma_sq = jeffreys_sigma ? 1.0 : config.sigma_sq_value;

    // One RNG stream per coordinate plus one for the global draws; streams
    // advance independently, so a parallel split over j cannot reorder them.
    std::vector<Pcg32> coord_rng;
    coord_rng.reserve(m);
    for (std::size_t j = 0; j < m; ++j) coord_rng.emplace_back(config.seed, j);
    Pcg32 global_rng(config.seed, m);

    PosteriorSummary summary;
    summary.beta_mean.assign(m, 0.0);
    summary.kappa_mean.assign(m, 0.0);

    const std::size_t total_sweeps = config.burn_in + config.samples;
    for (std::size_t sweep = 0; sweep < total_sweeps; ++sweep) {
        double sum_beta_sq_over_eta = 0.0;
        double sum_resid_sq = 0.0;

        for (std::size_t j = 0; j < m; ++j) {
            Pcg32& rng = coord_rng[j];

            // (a) beta_j | rest
            const double s = st.xi_sq * st.eta_sq[j];
            const double w = s / (s + st.sigma_sq);
            st.beta[j] = w * y.values[j] + std::sqrt(st.sigma_sq * w) * normal_draw(rng);

            // (b) eta_j^2 | rest
            const double b_sq = st.beta[j] * st.beta[j];
            const double eta_scale = 1.0 / st.nu[j] + b_sq / (2.0 * st.xi_sq);
            st.eta_sq[j] = std::max(eta_scale / exponential_draw(rng), kScaleFloor);

            // (c) nu_j | rest
            st.nu[j] = (1.0 + 1.0 / st.eta_sq[j]) / exponential_draw(rng);

            sum_beta_sq_over_eta += b_sq / st.eta_sq[j];
            const double resid = y.values[j] - st.beta[j];
            sum_resid_sq += resid * resid;
        }

        // (d) global scale
        if (full_bayes_xi) {
            const double xi_scale = 1.0 / st.zeta + 0.5 * sum_beta_sq_over_eta;
            st.xi_sq = std::max(
                inverse_gamma_draw(global_rng, 0.5 * (static_cast<double>(m) + 1.0), xi_scale),
                kScaleFloor);
            st.zeta = (1.0 + 1.0 / st.xi_sq) / exponential_draw(global_rng);
        }

        // (e) noise variance
        if (jeffreys_sigma) {
            st.sigma_sq = std::max(
                inverse_gamma_draw(global_rng, 0.5 * static_cast<double>(m), 0.5 * sum_resid_sq),
                kScaleFloor);
        }

        if (!std::isfinite(sum_beta_sq_over_eta) || !std::isfinite(st.xi_sq) ||
            !std::isfinite(st.sigma_sq)) {
            throw sampler_error("gibbs_run: non-finite draw at sweep " + std::to_string(sweep),
                                sweep);
        }

        if (sweep >= config.burn_in) {
            for (std::size_t j = 0; j < m; ++j) {
                summary.beta_mean[j] += st.beta[j];
                summary.kappa_mean[j] += 1.0 / (1.0 + st.eta_sq[j] * st.xi_sq);
            }
            summary.xi_mean += std::sqrt(st.xi_sq);
            summary.sigma_sq_mean += st.sigma_sq;
        }
    }

    const double inv_n = 1.0 / static_cast<double>(config.samples);
    for (std::size_t j = 0; j < m; ++j) {
        summary.beta_mean[j] *= inv_n;
        summary.kappa_mean[j] *= inv_n;
    }
    summary.xi_mean *= inv_n;
    summary.sigma_sq_mean *= inv_n;
    return summary;
}

double hs_marginal_density(double y, double xi) {
    if (!(xi > 0.0)) throw domain_error("hs_marginal_density: xi must be positive");
    const double xi_sq = xi * xi;
    // eta = tan(u) turns pi(eta) deta into (2/pi) du.
    auto g = [&](double u) {
        const double t = std::tan(u);
        const double var = 1.0 + xi_sq * t * t;
        return (2.0 / M_PI) * normal_pdf(y, 0.0, std::sqrt(var));
    };
    return integrate_panels(g, marginal_panels(y, xi));
}

double hs_log_marginal(const ObservationVector& y, double xi) {
    double total = 0.0;
    for (double yj : y.values) {
        const double density = hs_marginal_density(yj, xi);
        if (!(density > 0.0) || !std::isfinite(density))
            throw estimation_error("hs_log_marginal: quadrature failure at y = " +
                                   std::to_string(yj));
        total += std::log(density);
    }
    return total;
}

double mmle_xi(const ObservationVector& y) {
    constexpr int kGridSize = 200;
    const auto m = static_cast<double>(y.size());
    const double lo = std::log(1.0 / m);
    const double hi = 0.0;  // log(1)
    if (y.size() == 1) return 1.0;

    double best_xi = 1.0 / m;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGridSize; ++i) {
        const double xi = std::exp(lo + (hi - lo) * i / (kGridSize - 1.0));
        const double ll = hs_log_marginal(y, xi);
        if (ll > best_ll) {
            best_ll = ll;
            best_xi = xi;
        }
    }
    return std::clamp(best_xi, 1.0 / m, 1.0);
}

double posterior_kappa_quadrature(double y, double xi) {
    if (!(xi > 0.0)) throw domain_error("posterior_kappa_quadrature: xi must be positive");
    const double xi_sq = xi * xi;
    const auto cuts = marginal_panels(y, xi);
    auto weight = [&](double u) {
        const double t = std::tan(u);
        const double var = 1.0 + xi_sq * t * t;
        return (2.0 / M_PI) * normal_pdf(y, 0.0, std::sqrt(var));
    };
    auto weighted_kappa = [&](double u) {
        const double t = std::tan(u);
        const double var = 1.0 + xi_sq * t * t;
        return weight(u) / var;  // kappa = 1 / (1 + xi^2 eta^2) = 1 / var
    };
    const double denom = integrate_panels(weight, cuts);
    if (!(denom > 0.0) || !std::isfinite(denom))
        throw estimation_error("posterior_kappa_quadrature: quadrature failure");
    return integrate_panels(weighted_kappa, cuts) / denom;
}

double posterior_beta_mean_quadrature(double y, double xi) {
    return (1.0 - posterior_kappa_quadrature(y, xi)) * y;
}

DecisionVector hs_decision(const PosteriorSummary& summary, const ObservationVector& y) {
    if (summary.beta_mean.size() != y.size())
        throw dimension_error("hs_decision: summary and observations lengths differ");
    std::vector<bool> reject(y.size(), false);
    for (std::size_t j = 0; j < y.size(); ++j) {
        reject[j] = y.values[j] != 0.0 &&
                    std::fabs(summary.beta_mean[j]) > 0.5 * std::fabs(y.values[j]);
    }
    return DecisionVector(std::move(reject));
}

}  // namespace fahs
