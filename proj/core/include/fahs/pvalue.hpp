#pragma once

// p-value based procedures: two-sided normal p-values, the Benjamini-Hochberg
// step-up rule, Storey's pi0 estimator and the q-value backward recursion.

#include <vector>

#include "fahs/model.hpp"

namespace fahs {

struct PValueVector {
    std::vector<double> p;

    PValueVector() = default;
    explicit PValueVector(std::vector<double> values);

    std::size_t size() const { return p.size(); }
};

struct QValueResult {
    std::vector<double> q;  // aligned with the input hypotheses
    double pi0_hat = 1.0;
};

// Two-sided p-values for every observation under the theoretical N(0,1) null.
PValueVector p_values(const ObservationVector& y);

// Step-up procedure: find k* = max{k : p_(k) <= gamma*k/m} and reject every
// hypothesis with p_j <= p_(k*). Rejects nothing when no k qualifies.
// Throws config_error unless gamma is in (0,1).
DecisionVector bh_procedure(const PValueVector& p, double gamma);

// Raw tail-count estimator pi0(lambda) = #{p_j > lambda} / (m * (1-lambda)),
// capped at 1.
double estimate_pi0_at(const PValueVector& p, double lambda);

// Storey's smoothed estimator: tail counts on lambda = 0.05, 0.10, ..., 0.95,
// cubic least-squares smooth in lambda evaluated at 0.95, clamped to
// (1e-8, 1].
double estimate_pi0(const PValueVector& p);

// Backward recursion q_(m) = pi0 * p_(m), q_(j) = min(pi0*m*p_(j)/j, q_(j+1)).
// Rejecting {j : q_j <= gamma} is the q-value procedure at level gamma.
QValueResult qvalues(const PValueVector& p, double pi0_hat);

// Convenience: the q-value procedure end to end.
DecisionVector qvalue_procedure(const PValueVector& p, double gamma);

}  // namespace fahs
