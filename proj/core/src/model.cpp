#include "fahs/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fahs/errors.hpp"

namespace fahs {

ObservationVector::ObservationVector(std::vector<double> v, std::optional<double> correlation)
    : values(std::move(v)), rho(correlation) {
    if (values.empty())
        throw dimension_error("ObservationVector: need at least one observation");
    for (double x : values) {
        if (!std::isfinite(x))
            throw domain_error("ObservationVector: all observations must be finite");
    }
    if (rho && (*rho < 0.0 || *rho >= 1.0))
        throw config_error("ObservationVector: rho must lie in [0,1), got " +
                           std::to_string(*rho));
}

GroundTruth GroundTruth::from_beta(std::vector<double> beta) {
    GroundTruth truth;
    truth.signal.resize(beta.size());
    for (std::size_t j = 0; j < beta.size(); ++j) truth.signal[j] = beta[j] != 0.0;
    truth.beta = std::move(beta);
    return truth;
}

std::size_t GroundTruth::signal_count() const {
    return static_cast<std::size_t>(std::count(signal.begin(), signal.end(), true));
}

DecisionVector::DecisionVector(std::vector<bool> flags) : reject(std::move(flags)) {
    R = static_cast<std::size_t>(std::count(reject.begin(), reject.end(), true));
}

ConfusionTable confusion(const DecisionVector& decisions, const GroundTruth& truth) {
    if (decisions.size() != truth.size())
        throw dimension_error("confusion: decisions (" + std::to_string(decisions.size()) +
                              ") and truth (" + std::to_string(truth.size()) +
                              ") lengths differ");
    ConfusionTable t;
    for (std::size_t j = 0; j < truth.size(); ++j) {
        if (decisions.reject[j]) {
            if (truth.signal[j]) ++t.TD; else ++t.FD;
        } else {
            if (truth.signal[j]) ++t.FN; else ++t.TN;
        }
    }
    return t;
}

FdpSummary fdp_and_power(const ConfusionTable& table) {
    FdpSummary s;
    const std::size_t r = table.R();
    const std::size_t m1 = table.m1();
    s.fdp = r == 0 ? 0.0 : static_cast<double>(table.FD) / static_cast<double>(r);
    s.power = m1 == 0 ? 0.0 : static_cast<double>(table.TD) / static_cast<double>(m1);
    return s;
}

}  // namespace fahs
