#include "fahs/two_groups.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

#include "fahs/errors.hpp"
#include "fahs/special.hpp"

namespace fahs {

namespace {

// Natural cubic spline basis (truncated-power construction): K = df + 1
// equally spaced knots over the data range; basis is linear beyond the
// boundary knots. Column 0 is z itself, columns 1..df-1 are the curvature
// terms d_k(z) - d_{K-2}(z).
struct NaturalSplineBasis {
    std::vector<double> knots;

    static NaturalSplineBasis over(double lo, double hi, int df) {
        NaturalSplineBasis basis;
        const int K = df + 1;
        basis.knots.resize(K);
        for (int k = 0; k < K; ++k)
            basis.knots[k] = lo + (hi - lo) * k / static_cast<double>(K - 1);
        return basis;
    }

    int columns() const { return static_cast<int>(knots.size()) - 1; }

    double d(int k, double z) const {
        const double last = knots.back();
        auto cube_plus = [](double v) { return v > 0.0 ? v * v * v : 0.0; };
        return (cube_plus(z - knots[k]) - cube_plus(z - last)) / (last - knots[k]);
    }

    void evaluate(double z, double* out) const {
        const int K = static_cast<int>(knots.size());
        out[0] = z;
        const double d_last = d(K - 2, z);
        for (int k = 0; k + 2 < K; ++k) out[k + 1] = d(k, z) - d_last;
    }
};

double poisson_deviance(const std::vector<double>& y, const Eigen::VectorXd& mu) {
    double dev = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] > 0.0) dev += y[i] * std::log(y[i] / mu[i]) - (y[i] - mu[i]);
        else dev += mu[i];
    }
    return 2.0 * dev;
}

}  // namespace

TwoGroupsFit fit_marginal_density(const ObservationVector& z, int bins, int df) {
    constexpr int kMaxIterations = 50;
    constexpr double kDevianceTol = 1e-8;

    const std::size_t m = z.size();
    if (bins < 10) throw config_error("fit_marginal_density: need bins >= 10");
    if (df < 3 || df >= bins) throw config_error("fit_marginal_density: need 3 <= df < bins");
    if (m < static_cast<std::size_t>(bins))
        throw config_error("fit_marginal_density: need at least `bins` observations");

    const auto [lo_it, hi_it] = std::minmax_element(z.values.begin(), z.values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi - lo > 1e-12 * std::max(1.0, std::fabs(lo))))
        throw fit_error("fit_marginal_density: degenerate observation range");

    const double width = (hi - lo) / bins;
    std::vector<double> counts(bins, 0.0);
    for (double v : z.values) {
        auto idx = static_cast<long>((v - lo) / width);
        idx = std::clamp<long>(idx, 0, bins - 1);
        counts[static_cast<std::size_t>(idx)] += 1.0;
    }
    std::vector<double> mids(bins);
    for (int i = 0; i < bins; ++i) mids[i] = lo + width * (i + 0.5);

    const auto basis = NaturalSplineBasis::over(mids.front(), mids.back(), df);
    const int p = basis.columns() + 1;  // intercept + spline columns
    Eigen::MatrixXd X(bins, p);
    std::vector<double> row(static_cast<std::size_t>(basis.columns()));
    for (int i = 0; i < bins; ++i) {
        X(i, 0) = 1.0;
        basis.evaluate(mids[i], row.data());
        for (int c = 0; c < basis.columns(); ++c) X(i, c + 1) = row[static_cast<std::size_t>(c)];
    }

    // IRLS for the Poisson log-linear model.
    Eigen::VectorXd mu(bins);
    for (int i = 0; i < bins; ++i) mu(i) = counts[static_cast<std::size_t>(i)] + 0.5;
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(p);
    double dev_prev = poisson_deviance(counts, mu);
    int iterations = 0;
    double rel_change = 0.0;
    bool converged = false;
    while (iterations < kMaxIterations) {
        ++iterations;
        Eigen::VectorXd sqrt_w(bins);
        Eigen::VectorXd target(bins);
        for (int i = 0; i < bins; ++i) {
            const double mui = mu(i);
            sqrt_w(i) = std::sqrt(mui);
            target(i) = std::log(mui) + (counts[static_cast<std::size_t>(i)] - mui) / mui;
        }
        const Eigen::MatrixXd Xw = sqrt_w.asDiagonal() * X;
        const Eigen::VectorXd zw = sqrt_w.asDiagonal() * target;
        coef = Xw.colPivHouseholderQr().solve(zw);
        const Eigen::VectorXd eta = X * coef;
        for (int i = 0; i < bins; ++i) mu(i) = std::exp(std::clamp(eta(i), -300.0, 300.0));

        const double dev = poisson_deviance(counts, mu);
        rel_change = std::fabs(dev - dev_prev) / (std::fabs(dev) + 0.1);
        dev_prev = dev;
        if (rel_change < kDevianceTol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw fit_error("fit_marginal_density: IRLS did not converge", iterations, rel_change);

    // Evaluable (unnormalized) density: exp(spline) scaled by count mass.
    auto shared_basis = std::make_shared<NaturalSplineBasis>(basis);
    auto shared_coef = std::make_shared<Eigen::VectorXd>(coef);
    const double raw_scale = 1.0 / (static_cast<double>(m) * width);
    auto raw_density = [shared_basis, shared_coef, raw_scale](double v) {
        std::vector<double> cols(static_cast<std::size_t>(shared_basis->columns()));
        shared_basis->evaluate(v, cols.data());
        double eta = (*shared_coef)(0);
        for (int c = 0; c < shared_basis->columns(); ++c)
            eta += (*shared_coef)(c + 1) * cols[static_cast<std::size_t>(c)];
        return raw_scale * std::exp(std::clamp(eta, -300.0, 300.0));
    };

    // Normalize by trapezoid over the bin-midpoint grid.
    double integral = 0.0;
    std::vector<double> on_grid(mids.size());
    for (std::size_t i = 0; i < mids.size(); ++i) on_grid[i] = raw_density(mids[i]);
    for (std::size_t i = 0; i + 1 < mids.size(); ++i)
        integral += 0.5 * (on_grid[i] + on_grid[i + 1]) * (mids[i + 1] - mids[i]);
    if (!(integral > 0.0) || !std::isfinite(integral))
        throw fit_error("fit_marginal_density: non-normalizable fit", iterations, integral);

    // pi0 and null parameters keep their N(0,1)/1.0 defaults; callers refine
    // them with estimate_null.
    TwoGroupsFit fit;
    fit.f_hat = [raw_density, integral](double v) { return raw_density(v) / integral; };
    fit.grid = std::move(mids);
    fit.density_on_grid.resize(on_grid.size());
    for (std::size_t i = 0; i < on_grid.size(); ++i)
        fit.density_on_grid[i] = on_grid[i] / integral;
    fit.irls_iterations = iterations;
    return fit;
}

NullEstimate estimate_null(const TwoGroupsFit& fit, NullMode mode) {
    if (fit.grid.empty() || fit.grid.size() != fit.density_on_grid.size())
        throw fit_error("estimate_null: fit carries no grid");

    const auto mode_idx = static_cast<std::size_t>(
        std::max_element(fit.density_on_grid.begin(), fit.density_on_grid.end()) -
        fit.density_on_grid.begin());
    const double z_mode = fit.grid[mode_idx];

    std::vector<std::size_t> window;
    for (std::size_t i = 0; i < fit.grid.size(); ++i) {
        if (std::fabs(fit.grid[i] - z_mode) <= 1.0) window.push_back(i);
    }
    if (window.size() < 10)
        throw fit_error("estimate_null: central window has fewer than 10 bins");

    NullEstimate est;
    if (mode == NullMode::theoretical) {
        est.null_mean = 0.0;
        est.null_sd = 1.0;
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i : window) {
            const double phi = normal_pdf(fit.grid[i]);
            num += fit.density_on_grid[i] * phi;
            den += phi * phi;
        }
        est.pi0_hat = std::clamp(num / den, 1e-8, 1.0);
        return est;
    }

    // Empirical null: quadratic fit to the log density on the window.
    Eigen::MatrixXd X(window.size(), 3);
    Eigen::VectorXd y(window.size());
    for (std::size_t r = 0; r < window.size(); ++r) {
        const double zi = fit.grid[window[r]];
        const double fi = fit.density_on_grid[window[r]];
        if (!(fi > 0.0)) throw fit_error("estimate_null: zero density inside central window");
        X(static_cast<long>(r), 0) = 1.0;
        X(static_cast<long>(r), 1) = zi;
        X(static_cast<long>(r), 2) = zi * zi;
        y(static_cast<long>(r)) = std::log(fi);
    }
    const Eigen::VectorXd c = X.colPivHouseholderQr().solve(y);
    if (!(c(2) < 0.0))
        throw fit_error("estimate_null: log density not concave on central window");
    est.null_sd = std::sqrt(-0.5 / c(2));
    est.null_mean = -0.5 * c(1) / c(2);
    const double log_peak = c(0) + c(1) * est.null_mean + c(2) * est.null_mean * est.null_mean;
    est.pi0_hat =
        std::clamp(std::exp(log_peak) * est.null_sd * std::sqrt(2.0 * M_PI), 1e-8, 1.0);
    return est;
}

LocfdrVector locfdr_values(const ObservationVector& z, const TwoGroupsFit& fit) {
    if (!fit.f_hat) throw fit_error("locfdr_values: fit has no density");
    LocfdrVector out;
    out.values.resize(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
        const double fz = fit.f_hat(z.values[j]);
        if (fz <= 0.0) {
            out.values[j] = 1.0;  // most-null reading of a vanishing marginal
            continue;
        }
        const double f0 = normal_pdf(z.values[j], fit.null_mean, fit.null_sd);
        out.values[j] = std::clamp(fit.pi0_hat * f0 / fz, 0.0, 1.0);
    }
    return out;
}

DecisionVector eb_stepup(const LocfdrVector& locfdr, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw config_error("eb_stepup: gamma must lie in (0,1)");
    const std::size_t m = locfdr.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return locfdr.values[a] < locfdr.values[b];
    });

    std::size_t k = 0;
    double running = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        running += locfdr.values[order[j]];
        if (running / static_cast<double>(j + 1) <= gamma) k = j + 1;
    }

    std::vector<bool> reject(m, false);
    for (std::size_t j = 0; j < k; ++j) reject[order[j]] = true;
    return DecisionVector(std::move(reject));
}

DecisionVector locfdr_procedure(const ObservationVector& z, double gamma, NullMode mode,
                                int bins, int df) {
    // Wide-range data (heavy signal tails) makes 120 bins too coarse for the
    // central-matching window; scale the bin count so bins stay narrower than
    // 0.2 where the sample allows it.
    const auto [lo, hi] = std::minmax_element(z.values.begin(), z.values.end());
    const int wanted = static_cast<int>(std::ceil(5.0 * (*hi - *lo))) + 1;
    const int effective_bins =
        std::min<int>(std::max(bins, wanted), static_cast<int>(z.size()));

    TwoGroupsFit fit = fit_marginal_density(z, effective_bins, df);
    const NullEstimate est = estimate_null(fit, mode);
    fit.pi0_hat = est.pi0_hat;
    fit.null_mean = est.null_mean;
    fit.null_sd = est.null_sd;
    return eb_stepup(locfdr_values(z, fit), gamma);
}

}  // namespace fahs
