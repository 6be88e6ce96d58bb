#pragma once

// Differential-expression pipeline: expression matrix -> two-sample pooled
// t-statistics -> z-scores via the probability integral transform -> ranked
// discoveries per procedure.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fahs/model.hpp"
#include "fahs/simulate.hpp"

namespace fahs {

// genes x subjects, row-major; the first group_split columns are the control
// group. Pooled variance needs at least two subjects per group.
struct ExpressionMatrix {
    std::size_t genes = 0;
    std::size_t subjects = 0;
    std::size_t group_split = 0;
    std::vector<double> values;

    double at(std::size_t gene, std::size_t subject) const {
        return values[gene * subjects + subject];
    }
    void validate() const;  // throws config_error / dimension_error
};

struct TStatistics {
    std::vector<double> t;
    int df = 0;                               // n1 + n2 - 2
    std::vector<std::size_t> constant_genes;  // zero pooled variance; t forced to 0
};

// Per-gene two-sample pooled-variance t statistic,
// t_j = (mean2 - mean1) / s_j with s_j^2 = (1/n1 + 1/n2) * pooled SS / df.
TStatistics t_statistics(const ExpressionMatrix& matrix);

// z_j = Phi^-1(F_t(t_j; df)), evaluated tail-side so extreme statistics do
// not saturate. Strictly monotone in t. Throws domain_error if df <= 0.
ObservationVector z_transform(const std::vector<double>& t, int df);
double t_to_z(double t, int df);

struct GeneEntry {
    std::size_t gene = 0;  // 1-based index
    double statistic = 0.0;
    std::optional<double> p;
    std::optional<double> q;
    std::optional<double> locfdr_value;
    std::optional<double> beta_hat;
};

struct ProcedureRanking {
    std::string procedure;
    std::optional<double> xi_hat;
    std::vector<GeneEntry> entries;  // rejected genes, ranking order
};

struct GeneRanking {
    std::vector<ProcedureRanking> per_procedure;
};

// Run each procedure at level gamma and rank its rejected genes: p ascending
// for bh, q ascending for qvalue, locfdr ascending for the two-groups EB,
// |beta_hat| descending for the horseshoe variants. Horseshoe runs derive
// per-procedure seeds from config.seed.
GeneRanking rank_genes(const ObservationVector& z, const std::vector<Procedure>& procedures,
                       double gamma, const GibbsConfig& config);

// CSV inputs. Throws io_error carrying a line number on malformed content.
ExpressionMatrix read_expression_csv(const std::string& path);
ObservationVector read_zscore_csv(const std::string& path);

}  // namespace fahs
