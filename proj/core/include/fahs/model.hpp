#pragma once

// Shared data model for the sparse normal means testing problem: observed
// z-scores, ground truth, per-hypothesis decisions, and the TN/FD/FN/TD
// accounting every procedure and the simulation harness report against.

#include <cstddef>
#include <optional>
#include <vector>

namespace fahs {

// The m observations y_j ~ N(beta_j, 1), optionally with known
// equicorrelation rho of the noise (absent means independent).
struct ObservationVector {
    std::vector<double> values;
    std::optional<double> rho;

    ObservationVector() = default;
    explicit ObservationVector(std::vector<double> v,
                               std::optional<double> correlation = std::nullopt);

    std::size_t size() const { return values.size(); }
};

// True means and the derived signal indicator; beta_j == 0 exactly is noise.
struct GroundTruth {
    std::vector<double> beta;
    std::vector<bool> signal;

    static GroundTruth from_beta(std::vector<double> beta);

    std::size_t size() const { return beta.size(); }
    std::size_t signal_count() const;
};

// Per-hypothesis reject flags plus the rejection count R.
struct DecisionVector {
    std::vector<bool> reject;
    std::size_t R = 0;

    DecisionVector() = default;
    explicit DecisionVector(std::vector<bool> flags);

    std::size_t size() const { return reject.size(); }
};

// Table of outcomes: TN + FD = m0, FN + TD = m1, FD + TD = R.
struct ConfusionTable {
    std::size_t TN = 0;
    std::size_t FD = 0;
    std::size_t FN = 0;
    std::size_t TD = 0;

    std::size_t m() const { return TN + FD + FN + TD; }
    std::size_t m0() const { return TN + FD; }
    std::size_t m1() const { return FN + TD; }
    std::size_t R() const { return FD + TD; }
};

// False discovery proportion and power, both with 0/0 defined as 0.
struct FdpSummary {
    double fdp = 0.0;
    double power = 0.0;
};

// Cross-tabulate decisions against ground truth.
// Throws dimension_error if lengths differ.
ConfusionTable confusion(const DecisionVector& decisions, const GroundTruth& truth);

FdpSummary fdp_and_power(const ConfusionTable& table);

}  // namespace fahs
