#include "fahs/pvalue.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "fahs/errors.hpp"
#include "fahs/special.hpp"

namespace fahs {

PValueVector::PValueVector(std::vector<double> values) : p(std::move(values)) {
    if (p.empty()) throw dimension_error("PValueVector: need at least one p-value");
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0))
            throw domain_error("PValueVector: entries must lie in [0,1]");
    }
}

PValueVector p_values(const ObservationVector& y) {
    std::vector<double> p(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) p[j] = two_sided_p(y.values[j]);
    return PValueVector(std::move(p));
}

DecisionVector bh_procedure(const PValueVector& p, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw config_error("bh_procedure: gamma must lie in (0,1), got " +
                           std::to_string(gamma));
    const std::size_t m = p.size();
    std::vector<double> sorted(p.p);
    std::sort(sorted.begin(), sorted.end());

    double threshold = -1.0;  // no rejection
    for (std::size_t k = m; k >= 1; --k) {
        if (sorted[k - 1] <= gamma * static_cast<double>(k) / static_cast<double>(m)) {
            threshold = sorted[k - 1];
            break;
        }
    }

    std::vector<bool> reject(m, false);
    if (threshold >= 0.0) {
        for (std::size_t j = 0; j < m; ++j) reject[j] = p.p[j] <= threshold;
    }
    return DecisionVector(std::move(reject));
}

double estimate_pi0_at(const PValueVector& p, double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw config_error("estimate_pi0_at: lambda must lie in [0,1)");
    const auto above = static_cast<double>(
        std::count_if(p.p.begin(), p.p.end(), [&](double v) { return v > lambda; }));
    const double est = above / (static_cast<double>(p.size()) * (1.0 - lambda));
    return std::min(est, 1.0);
}

double estimate_pi0(const PValueVector& p) {
    constexpr double kFloor = 1e-8;

    // Tail counts on the lambda grid.
    std::array<double, 19> lambdas{};
    std::array<double, 19> raw{};
    for (int i = 0; i < 19; ++i) {
        lambdas[i] = 0.05 * (i + 1);
        const auto above = static_cast<double>(std::count_if(
            p.p.begin(), p.p.end(), [&](double v) { return v > lambdas[i]; }));
        raw[i] = above / (static_cast<double>(p.size()) * (1.0 - lambdas[i]));
    }

    // Least-squares cubic in lambda, evaluated at the last grid point.
    // Normal equations on the 4x4 moment matrix, solved by Gaussian
    // elimination with partial pivoting.
    double xtx[4][4] = {};
    double xty[4] = {};
    for (int i = 0; i < 19; ++i) {
        double pow_l[7];
        pow_l[0] = 1.0;
        for (int k = 1; k < 7; ++k) pow_l[k] = pow_l[k - 1] * lambdas[i];
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) xtx[r][c] += pow_l[r + c];
            xty[r] += pow_l[r] * raw[i];
        }
    }
    double aug[4][5];
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) aug[r][c] = xtx[r][c];
        aug[r][4] = xty[r];
    }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(aug[r][col]) > std::fabs(aug[pivot][col])) pivot = r;
        std::swap(aug[col], aug[pivot]);
        for (int r = col + 1; r < 4; ++r) {
            const double f = aug[r][col] / aug[col][col];
            for (int c = col; c < 5; ++c) aug[r][c] -= f * aug[col][c];
        }
    }
    double coef[4];
    for (int r = 3; r >= 0; --r) {
        double s = aug[r][4];
        for (int c = r + 1; c < 4; ++c) s -= aug[r][c] * coef[c];
        coef[r] = s / aug[r][r];
    }

    const double l = lambdas.back();
    const double smooth = coef[0] + coef[1] * l + coef[2] * l * l + coef[3] * l * l * l;
    return std::clamp(smooth, kFloor, 1.0);
}

QValueResult qvalues(const PValueVector& p, double pi0_hat) {
    if (!(pi0_hat > 0.0 && pi0_hat <= 1.0))
        throw config_error("qvalues: pi0_hat must lie in (0,1]");
    const std::size_t m = p.size();

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p.p[a] < p.p[b]; });

    std::vector<double> q_sorted(m);
    q_sorted[m - 1] = pi0_hat * p.p[order[m - 1]];
    for (std::size_t j = m - 1; j >= 1; --j) {
        const double candidate =
            pi0_hat * static_cast<double>(m) * p.p[order[j - 1]] / static_cast<double>(j);
        q_sorted[j - 1] = std::min(candidate, q_sorted[j]);
    }

    QValueResult result;
    result.pi0_hat = pi0_hat;
    result.q.resize(m);
    for (std::size_t j = 0; j < m; ++j) result.q[order[j]] = q_sorted[j];
    return result;
}

DecisionVector qvalue_procedure(const PValueVector& p, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw config_error("qvalue_procedure: gamma must lie in (0,1)");
    const QValueResult qr = qvalues(p, estimate_pi0(p));
    std::vector<bool> reject(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) reject[j] = qr.q[j] <= gamma;
    return DecisionVector(std::move(reject));
}

}  // namespace fahs
