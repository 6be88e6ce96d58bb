#include "fahs/fahs.hpp"

#include <cmath>
#include <string>

#include "fahs/errors.hpp"
#include "fahs/pvalue.hpp"

namespace fahs {

double xi_mfahs(std::size_t R, std::size_t m) {
    if (m < 1) throw domain_error("xi_mfahs: m must be >= 1");
    if (R > m) throw domain_error("xi_mfahs: R cannot exceed m");
    if (R == 0) return 1.0 / static_cast<double>(m);
    return static_cast<double>(R) / static_cast<double>(m);
}

double xi_efahs(std::size_t R, std::size_t m, double sigma, double cap) {
    if (m < 1) throw domain_error("xi_efahs: m must be >= 1");
    if (R > m) throw domain_error("xi_efahs: R cannot exceed m");
    if (!(sigma > 0.0)) throw domain_error("xi_efahs: sigma must be positive");
    if (R == 0) return 1.0 / static_cast<double>(m);
    if (R == m) return cap;
    const double value = sigma * static_cast<double>(R) / static_cast<double>(m - R);
    return std::min(value, cap);
}

FahsResult run_fahs(const ObservationVector& y, double gamma, FahsVariant variant,
                    const GibbsConfig& config) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw config_error("run_fahs: gamma must lie in (0,1), got " + std::to_string(gamma));

    // Step 1: estimate the signal count by the BH rejection count.
    const DecisionVector bh = bh_procedure(p_values(y), gamma);
    const std::size_t m = y.size();

    // Step 2: the variant's global-scale estimate.
    FahsResult result;
    result.m1_hat = bh.R;
    GibbsConfig run_config = config;
    run_config.xi_mode = XiMode::fixed;
    if (variant == FahsVariant::mfahs) {
        result.xi_hat = xi_mfahs(bh.R, m);
        run_config.sigma_mode = SigmaMode::jeffreys;
    } else {
        result.xi_hat = xi_efahs(bh.R, m, 1.0);
        run_config.sigma_mode = SigmaMode::fixed;
        run_config.sigma_sq_value = 1.0;
    }
    run_config.xi_value = result.xi_hat;

    // Steps 3 and 4: fixed-xi Gibbs, then the half-observation rule.
    result.summary = gibbs_run(y, run_config);
    result.decisions = hs_decision(result.summary, y);
    return result;
}

Theorem1Report theorem1_report(double xi, std::size_t m, std::size_t m1, double alpha,
                               double omega, double c, double slack) {
    if (m1 == 0 || m1 >= m)
        throw domain_error("theorem1_report: need 0 < m1 < m");
    if (!(alpha > 1.0)) throw domain_error("theorem1_report: alpha must exceed 1");
    if (!(omega > 0.0)) throw domain_error("theorem1_report: omega must be positive");
    if (!(c > 0.0)) throw domain_error("theorem1_report: c must be positive");

    const double ratio = static_cast<double>(m1) / static_cast<double>(m);
    const double log_term = std::log(static_cast<double>(m) / static_cast<double>(m1));
    const double inv_exp = 1.0 / (alpha - 1.0);

    Theorem1Report report;
    report.alpha = alpha;
    report.omega = omega;
    report.c = c;
    report.slack = slack;
    report.lower_bound = std::pow(std::pow(ratio, c) * std::sqrt(log_term), inv_exp);
    report.upper_bound = std::pow(std::pow(ratio * log_term, alpha), inv_exp);
    report.satisfied_lower = xi >= report.lower_bound;
    report.satisfied_upper = xi <= slack * report.upper_bound;
    report.c_within_theorem = c < 1.0 + 0.5 * omega;
    report.c_within_appendix = c < 1.0;
    return report;
}

}  // namespace fahs
