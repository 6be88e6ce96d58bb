#pragma once

// Two-groups empirical Bayes machinery: marginal density estimation by
// Lindsey's method (Poisson regression of histogram counts on a natural
// cubic spline basis), null estimation by central matching, the locfdr
// statistic locfdr(z) = pi0 * f0(z) / f(z), and the running-mean step-up rule.

#include <functional>
#include <vector>

#include "fahs/model.hpp"

namespace fahs {

enum class NullMode { theoretical, empirical };

// Fitted marginal plus null-component parameters.
struct TwoGroupsFit {
    std::function<double(double)> f_hat;  // normalized marginal density
    double pi0_hat = 1.0;
    double null_mean = 0.0;
    double null_sd = 1.0;

    // Fit internals: bin-midpoint grid and the density evaluated on it.
    std::vector<double> grid;
    std::vector<double> density_on_grid;
    int irls_iterations = 0;
};

struct LocfdrVector {
    std::vector<double> values;  // clipped into [0,1]

    std::size_t size() const { return values.size(); }
};

struct NullEstimate {
    double null_mean = 0.0;
    double null_sd = 1.0;
    double pi0_hat = 1.0;
};

// Histogram the observations into `bins` equal-width bins, fit log-linear
// counts on a natural cubic spline basis with `df` degrees of freedom by
// IRLS, and normalize so the density integrates to 1 over the bin grid.
// Throws fit_error on a degenerate range or IRLS non-convergence.
TwoGroupsFit fit_marginal_density(const ObservationVector& z, int bins = 120, int df = 7);

// Null-component estimation on the central window (bins within 1 unit of the
// fitted mode; needs at least 10). Theoretical mode keeps N(0,1) and matches
// only pi0; empirical mode also fits the null mean/sd by quadratic central
// matching of the log density.
NullEstimate estimate_null(const TwoGroupsFit& fit, NullMode mode);

// locfdr(z_j) = clip(pi0 * phi((z_j - mu0)/sd0)/sd0 / f_hat(z_j), 0, 1);
// a vanishing marginal forces the value to 1.
LocfdrVector locfdr_values(const ObservationVector& z, const TwoGroupsFit& fit);

// Reject the k hypotheses with smallest locfdr, k the largest index whose
// running mean of sorted values stays at or below gamma.
DecisionVector eb_stepup(const LocfdrVector& locfdr, double gamma);

// End-to-end two-groups procedure used by the simulation harness.
DecisionVector locfdr_procedure(const ObservationVector& z, double gamma,
                                NullMode mode = NullMode::theoretical, int bins = 120,
                                int df = 7);

}  // namespace fahs
