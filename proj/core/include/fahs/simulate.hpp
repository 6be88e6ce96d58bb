#pragma once

// Simulation harness: sparse normal means data generation (independent or
// equicorrelated noise), replication orchestration over settings, and
// FDR/FDP/power aggregation with boxplot statistics.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fahs/horseshoe.hpp"
#include "fahs/model.hpp"

namespace fahs {

enum class Procedure { bh, qvalue, locfdr, ebhs, fbhs, mfahs, efahs, oracle };

const char* to_string(Procedure p);
Procedure procedure_from_string(const std::string& name);  // throws config_error
std::vector<Procedure> parse_procedures(const std::string& comma_list);

// Which entries the beta standardization divides by: the sample sd of the
// whole vector (zeros included) or of the nonzero entries only.
enum class Standardize { all, nonzero };

struct SimulationSetting {
    std::string id;  // auto-derived if empty
    std::size_t m = 2000;
    double s = 0.1;    // signal proportion
    double psi = 5.0;  // slab sd
    double snr = 3.0;
    double rho = 0.0;
    double gamma = 0.1;
    std::size_t replications = 30;
    std::uint64_t base_seed = 1;
    std::vector<Procedure> procedures{Procedure::bh, Procedure::qvalue, Procedure::locfdr,
                                      Procedure::mfahs, Procedure::efahs};
    Standardize standardize = Standardize::all;
    GibbsConfig gibbs;       // burn_in/samples; per-record seeds are derived
    bool compute_pdc = true; // pdc tail probability for the FAHS records
    double pdc_threshold = 0.05;

    std::string effective_id() const;
    void validate() const;  // throws config_error
};

struct GeneratedData {
    ObservationVector y;
    GroundTruth truth;
};

// One (procedure, setting, replication) outcome.
struct ReplicationRecord {
    std::string setting_id;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    std::string procedure;
    double s = 0.0;
    double gamma = 0.0;
    double rho = 0.0;
    std::size_t m = 0;
    std::size_t R = 0;
    std::size_t FD = 0;
    std::size_t TD = 0;
    double fdp = 0.0;
    double power = 0.0;
    std::optional<double> xi_hat;
    std::optional<double> pdc_tail;
    std::int64_t wall_ms = 0;
    std::optional<std::string> error;
};

struct BoxStats {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double lo_whisker = 0.0;  // Tukey 1.5 IQR fences
    double hi_whisker = 0.0;
    std::vector<double> outliers;
};

struct AggregateCell {
    std::string setting_id;
    std::string procedure;
    double s = 0.0;
    double gamma = 0.0;
    double rho = 0.0;
    std::size_t m = 0;
    std::size_t n = 0;  // records aggregated (errored ones excluded)
    double fdr = 0.0;   // mean fdp
    BoxStats fdp_box;
    double mean_power = 0.0;
    std::optional<double> mean_xi_hat;
};

struct AggregateSummary {
    std::vector<AggregateCell> cells;
    std::size_t skipped_records = 0;  // errored records left out
};

// Deterministic seed for one replication of one setting.
std::uint64_t replication_seed(const SimulationSetting& setting, std::size_t replication);

// theta_j ~ Bernoulli(s); beta = theta * N(0, psi^2) standardized to sample
// sd = snr (zeros kept exact); y = beta + noise. An all-zero theta draw with
// s > 0 regenerates from the next substream rather than dividing by zero.
GeneratedData generate_independent(const SimulationSetting& setting, std::uint64_t seed);

// Same signals; noise eps_j = sqrt(rho) z0 + sqrt(1-rho) z_j.
GeneratedData generate_equicorrelated(const SimulationSetting& setting, std::uint64_t seed);

// Dispatch on rho == 0.
GeneratedData generate_data(const SimulationSetting& setting, std::uint64_t seed);

// Run one procedure on given data (exposed for the acceptance suite).
ReplicationRecord run_procedure(Procedure proc, const GeneratedData& data,
                                const SimulationSetting& setting, std::size_t replication,
                                std::uint64_t seed, bool timing = false);

struct GridOptions {
    int threads = 1;
    bool timing = false;  // measure wall_ms (off by default: keeps output byte-stable)
};

// Every setting x replication, same data fed to all requested procedures,
// one record per procedure. Per-record failures are recorded, never thrown.
// Record order is independent of the thread count.
std::vector<ReplicationRecord> run_grid(const std::vector<SimulationSetting>& settings,
                                        const GridOptions& options = {});

// Group by (setting, procedure): mean fdp (the empirical FDR), boxplot stats,
// mean power, mean xi_hat.
AggregateSummary aggregate(const std::vector<ReplicationRecord>& records);

// Type-7 quantile and box statistics helpers (exposed for tests/plots).
double quantile_type7(std::vector<double> sorted_values, double p);
BoxStats box_stats(std::vector<double> values);

}  // namespace fahs
