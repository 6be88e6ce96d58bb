#include "fahs/real_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fahs/errors.hpp"
#include "fahs/fahs.hpp"
#include "fahs/pvalue.hpp"
#include "fahs/rng.hpp"
#include "fahs/special.hpp"
#include "fahs/two_groups.hpp"

namespace fahs {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        // trim whitespace and CR
        const auto start = field.find_first_not_of(" \t\r");
        const auto end = field.find_last_not_of(" \t\r");
        fields.push_back(start == std::string::npos ? ""
                                                    : field.substr(start, end - start + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back("");
    return fields;
}

bool parse_number(const std::string& field, double& out) {
    if (field.empty()) return false;
    std::size_t consumed = 0;
    try {
        out = std::stod(field, &consumed);
    } catch (...) {
        return false;
    }
    return consumed == field.size();
}

}  // namespace

void ExpressionMatrix::validate() const {
    if (genes < 1) throw dimension_error("ExpressionMatrix: need at least one gene");
    if (values.size() != genes * subjects)
        throw dimension_error("ExpressionMatrix: value buffer does not match dimensions");
    const std::size_t n1 = group_split;
    const std::size_t n2 = subjects - group_split;
    if (n1 < 2 || n2 < 2)
        throw config_error("ExpressionMatrix: each group needs at least two subjects");
}

TStatistics t_statistics(const ExpressionMatrix& matrix) {
    matrix.validate();
    const std::size_t n1 = matrix.group_split;
    const std::size_t n2 = matrix.subjects - matrix.group_split;
    const double df = static_cast<double>(n1 + n2 - 2);
    const double inv_n = 1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2);

    TStatistics result;
    result.df = static_cast<int>(df);
    result.t.resize(matrix.genes);
    for (std::size_t g = 0; g < matrix.genes; ++g) {
        double mean1 = 0.0;
        double mean2 = 0.0;
        for (std::size_t i = 0; i < n1; ++i) mean1 += matrix.at(g, i);
        for (std::size_t i = n1; i < matrix.subjects; ++i) mean2 += matrix.at(g, i);
        mean1 /= static_cast<double>(n1);
        mean2 /= static_cast<double>(n2);

        double ss = 0.0;
        for (std::size_t i = 0; i < n1; ++i) {
            const double d = matrix.at(g, i) - mean1;
            ss += d * d;
        }
        for (std::size_t i = n1; i < matrix.subjects; ++i) {
            const double d = matrix.at(g, i) - mean2;
            ss += d * d;
        }
        const double s_sq = inv_n * ss / df;
        if (s_sq <= 0.0) {
            result.t[g] = 0.0;
            result.constant_genes.push_back(g);
        } else {
            result.t[g] = (mean2 - mean1) / std::sqrt(s_sq);
        }
    }
    return result;
}

double t_to_z(double t, int df) {
    if (df <= 0) throw domain_error("t_to_z: df must be positive");
    if (t == 0.0) return 0.0;
    // Work on the smaller tail so the normal quantile never saturates.
    if (t < 0.0) {
        return normal_quantile(student_t_cdf(t, df));
    }
    return -normal_quantile(student_t_sf(t, df));
}

ObservationVector z_transform(const std::vector<double>& t, int df) {
    if (df <= 0) throw domain_error("z_transform: df must be positive");
    std::vector<double> z(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) z[j] = t_to_z(t[j], df);
    return ObservationVector(std::move(z));
}

GeneRanking rank_genes(const ObservationVector& z, const std::vector<Procedure>& procedures,
                       double gamma, const GibbsConfig& config) {
    if (procedures.empty()) throw config_error("rank_genes: no procedures requested");
    if (!(gamma > 0.0 && gamma < 1.0)) throw config_error("rank_genes: gamma must lie in (0,1)");

    const PValueVector p = p_values(z);
    GeneRanking ranking;

    for (Procedure proc : procedures) {
        ProcedureRanking pr;
        pr.procedure = to_string(proc);
        std::vector<GeneEntry> entries;

        auto collect = [&](const DecisionVector& decisions, auto statistic_of,
                           bool ascending) {
            for (std::size_t j = 0; j < z.size(); ++j) {
                if (!decisions.reject[j]) continue;
                GeneEntry e = statistic_of(j);
                e.gene = j + 1;
                entries.push_back(e);
            }
            std::stable_sort(entries.begin(), entries.end(),
                             [&](const GeneEntry& a, const GeneEntry& b) {
                                 return ascending ? a.statistic < b.statistic
                                                  : a.statistic > b.statistic;
                             });
        };

        switch (proc) {
            case Procedure::bh: {
                const DecisionVector d = bh_procedure(p, gamma);
                collect(d,
                        [&](std::size_t j) {
                            GeneEntry e;
                            e.statistic = p.p[j];
                            e.p = p.p[j];
                            return e;
                        },
                        true);
                break;
            }
            case Procedure::qvalue: {
                const QValueResult qr = qvalues(p, estimate_pi0(p));
                std::vector<bool> reject(z.size());
                for (std::size_t j = 0; j < z.size(); ++j) reject[j] = qr.q[j] <= gamma;
                collect(DecisionVector(std::move(reject)),
                        [&](std::size_t j) {
                            GeneEntry e;
                            e.statistic = qr.q[j];
                            e.p = p.p[j];
                            e.q = qr.q[j];
                            return e;
                        },
                        true);
                break;
            }
            case Procedure::locfdr: {
                TwoGroupsFit fit = fit_marginal_density(z);
                const NullEstimate est = estimate_null(fit, NullMode::theoretical);
                fit.pi0_hat = est.pi0_hat;
                fit.null_mean = est.null_mean;
                fit.null_sd = est.null_sd;
                const LocfdrVector lf = locfdr_values(z, fit);
                const DecisionVector d = eb_stepup(lf, gamma);
                collect(d,
                        [&](std::size_t j) {
                            GeneEntry e;
                            e.statistic = lf.values[j];
                            e.locfdr_value = lf.values[j];
                            return e;
                        },
                        true);
                break;
            }
            case Procedure::mfahs:
            case Procedure::efahs: {
                GibbsConfig g = config;
                g.seed = derive_seed(config.seed, pr.procedure);
                const FahsVariant variant =
                    proc == Procedure::mfahs ? FahsVariant::mfahs : FahsVariant::efahs;
                const FahsResult result = run_fahs(z, gamma, variant, g);
                pr.xi_hat = result.xi_hat;
                collect(result.decisions,
                        [&](std::size_t j) {
                            GeneEntry e;
                            e.statistic = std::fabs(result.summary.beta_mean[j]);
                            e.beta_hat = result.summary.beta_mean[j];
                            e.p = p.p[j];
                            return e;
                        },
                        false);
                break;
            }
            case Procedure::ebhs:
            case Procedure::fbhs: {
                GibbsConfig g = config;
                g.seed = derive_seed(config.seed, pr.procedure);
                g.xi_mode = proc == Procedure::ebhs ? XiMode::mmle : XiMode::full_bayes;
                g.sigma_mode = SigmaMode::jeffreys;
                const PosteriorSummary summary = gibbs_run(z, g);
                pr.xi_hat = summary.xi_mean;
                collect(hs_decision(summary, z),
                        [&](std::size_t j) {
                            GeneEntry e;
                            e.statistic = std::fabs(summary.beta_mean[j]);
                            e.beta_hat = summary.beta_mean[j];
                            e.p = p.p[j];
                            return e;
                        },
                        false);
                break;
            }
            case Procedure::oracle:
                throw config_error("rank_genes: oracle needs ground truth; not available");
        }

        pr.entries = std::move(entries);
        ranking.per_procedure.push_back(std::move(pr));
    }
    return ranking;
}

ExpressionMatrix read_expression_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open expression matrix '" + path + "'");

    std::string line;
    long line_no = 0;

    // Header: group labels per subject column, optionally preceded by a
    // row-name column (detected when data rows carry one extra field).
    if (!std::getline(in, line)) throw io_error("empty expression matrix", 1);
    ++line_no;
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 4) throw io_error("header must list at least four subjects", line_no);

    std::vector<std::vector<double>> rows;
    bool has_row_names = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        std::size_t offset = 0;
        if (rows.empty()) {
            double probe;
            if (fields.size() == header.size() + 1 ||
                (!fields.empty() && !parse_number(fields[0], probe))) {
                has_row_names = true;
            }
        }
        if (has_row_names) offset = 1;
        std::vector<double> row;
        row.reserve(fields.size() - offset);
        for (std::size_t i = offset; i < fields.size(); ++i) {
            double v;
            if (!parse_number(fields[i], v))
                throw io_error("non-numeric cell '" + fields[i] + "'", line_no);
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw io_error("row has inconsistent column count", line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw io_error("expression matrix has no data rows", line_no);

    // Align header labels with data columns.
    std::size_t label_offset = 0;
    if (header.size() == rows.front().size() + 1) label_offset = 1;
    else if (header.size() != rows.front().size())
        throw io_error("header and data column counts differ", 1);

    const std::string first_label = header[label_offset];
    std::size_t split = 0;
    while (split < rows.front().size() && header[label_offset + split] == first_label) ++split;
    for (std::size_t i = split; i < rows.front().size(); ++i) {
        if (header[label_offset + i] == first_label)
            throw io_error("group labels must be contiguous in the header", 1);
    }

    ExpressionMatrix matrix;
    matrix.genes = rows.size();
    matrix.subjects = rows.front().size();
    matrix.group_split = split;
    matrix.values.reserve(matrix.genes * matrix.subjects);
    for (const auto& row : rows)
        matrix.values.insert(matrix.values.end(), row.begin(), row.end());
    matrix.validate();
    return matrix;
}

ObservationVector read_zscore_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open z-score file '" + path + "'");

    std::vector<double> z;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.empty() || fields[0].empty()) continue;
        double v;
        if (!parse_number(fields[0], v)) {
            if (line_no == 1) continue;  // header
            throw io_error("non-numeric z-score '" + fields[0] + "'", line_no);
        }
        if (fields.size() > 1) {
            double extra;
            if (parse_number(fields[1], extra))
                throw io_error("expected a single z-score column", line_no);
        }
        z.push_back(v);
    }
    if (z.empty()) throw io_error("no z-scores found in '" + path + "'", line_no);
    return ObservationVector(std::move(z));
}

}  // namespace fahs
