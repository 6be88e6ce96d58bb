// Command-line front end: `simulate` drives the replication grid, `analyze`
// the expression/z-score pipeline, `pdc` the prior-data-conflict check, and
// `oracle-check` compares the Gibbs sampler against its quadrature oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fahs/csv.hpp"
#include "fahs/errors.hpp"
#include "fahs/fahs.hpp"
#include "fahs/horseshoe.hpp"
#include "fahs/prior_data_conflict.hpp"
#include "fahs/real_data.hpp"
#include "fahs/simulate.hpp"
#include "fahs/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct SimulateOptions {
    std::string preset = "desk";
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<std::string> procedures;
    std::vector<double> s_list;
    std::vector<double> gamma_list;
    std::vector<double> rho_list;
    std::size_t m = 0;
    std::size_t replications = 0;
    double snr = 3.0;
    double psi = 5.0;
    std::size_t burn_in = 1000;
    std::size_t samples = 5000;
    std::string standardize = "all";
    bool svg = false;
    bool timing = false;
    bool no_pdc = false;
    double pdc_threshold = 0.05;
};

struct AnalyzeOptions {
    std::string input;
    bool as_matrix = false;
    bool as_zscores = false;
    double gamma = 0.1;
    std::vector<std::string> procedures{"bh", "qvalue", "locfdr", "mfahs", "efahs"};
    std::uint64_t seed = 1;
    std::size_t burn_in = 1000;
    std::size_t samples = 5000;
    std::size_t top_k = 10;
    std::string out_dir = "analysis";
};

struct PdcOptions {
    std::string input;
    double xi = 0.0;
    double sigma_diag = 1.0;
    double sigma_offdiag = 0.0;
    double threshold = 0.05;
    std::uint64_t seed = 1;
    int averaged = 0;  // 0 = single draw, K > 0 = mean over K draws
};

struct OracleCheckOptions {
    std::vector<double> xis{0.01, 0.05, 0.5};
    std::vector<double> ys{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    std::size_t burn_in = 1000;
    std::size_t samples = 5000;
    std::uint64_t seed = 42;
    double tol = 0.05;
};

std::vector<fahs::SimulationSetting> build_settings(const SimulateOptions& opt) {
    SimulateOptions o = opt;
    if (o.preset != "desk" && o.preset != "paper")
        throw fahs::config_error("preset must be 'desk' or 'paper'");
    const bool paper = o.preset == "paper";
    if (o.m == 0) o.m = paper ? 10000 : 2000;
    if (o.replications == 0) o.replications = paper ? 100 : 30;
    if (o.s_list.empty())
        o.s_list = paper ? std::vector<double>{0.05, 0.1, 0.2, 0.3, 0.4, 0.5}
                         : std::vector<double>{0.05, 0.2, 0.5};
    if (o.gamma_list.empty())
        o.gamma_list = paper ? std::vector<double>{0.1, 0.12, 0.14, 0.16, 0.18, 0.2}
                             : std::vector<double>{0.1, 0.2};
    if (o.rho_list.empty())
        o.rho_list = paper ? std::vector<double>{0.0, 0.1, 0.2, 0.3}
                           : std::vector<double>{0.0};
    if (o.procedures.empty()) {
        o.procedures = paper ? std::vector<std::string>{"bh", "qvalue", "locfdr", "ebhs",
                                                        "fbhs", "mfahs", "efahs"}
                             : std::vector<std::string>{"bh", "qvalue", "locfdr", "mfahs",
                                                        "efahs"};
    }

    fahs::Standardize standardize;
    if (o.standardize == "all") standardize = fahs::Standardize::all;
    else if (o.standardize == "nonzero") standardize = fahs::Standardize::nonzero;
    else throw fahs::config_error("standardize must be 'all' or 'nonzero'");

    std::vector<fahs::Procedure> procedures;
    for (const auto& name : o.procedures) procedures.push_back(fahs::procedure_from_string(name));

    std::vector<fahs::SimulationSetting> settings;
    for (double rho : o.rho_list) {
        for (double s : o.s_list) {
            for (double gamma : o.gamma_list) {
                fahs::SimulationSetting st;
                st.m = o.m;
                st.s = s;
                st.psi = o.psi;
                st.snr = o.snr;
                st.rho = rho;
                st.gamma = gamma;
                st.replications = o.replications;
                st.base_seed = o.seed;
                st.procedures = procedures;
                st.standardize = standardize;
                st.gibbs.burn_in = o.burn_in;
                st.gibbs.samples = o.samples;
                st.compute_pdc = !o.no_pdc;
                st.pdc_threshold = o.pdc_threshold;
                st.validate();
                settings.push_back(std::move(st));
            }
        }
    }
    return settings;
}

int cmd_simulate(const SimulateOptions& opt) {
    if (opt.threads < 1) throw fahs::config_error("threads must be >= 1");
    const std::vector<fahs::SimulationSetting> settings = build_settings(opt);

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw fahs::config_error("cannot create output directory '" + opt.out_dir + "'");

    fahs::GridOptions grid_options;
    grid_options.threads = opt.threads;
    grid_options.timing = opt.timing;

    const std::vector<fahs::ReplicationRecord> records = fahs::run_grid(settings, grid_options);
    const fs::path out(opt.out_dir);
    try {
        fahs::write_records_csv((out / "records.csv").string(), records);
        const fahs::AggregateSummary summary = fahs::aggregate(records);
        if (summary.skipped_records > 0) {
            std::cerr << "warning: " << summary.skipped_records
                      << " record(s) failed and were excluded from summary.csv\n";
        }
        fahs::write_summary_csv((out / "summary.csv").string(), summary);
        if (opt.svg) fahs::write_fdp_boxplots((out / "boxplots.svg").string(), summary);

        std::size_t errors = 0;
        for (const auto& r : records)
            if (r.error) ++errors;
        std::cout << "wrote " << records.size() << " records across " << settings.size()
                  << " settings to " << (out / "records.csv").string() << "\n";
        for (const auto& cell : summary.cells) {
            std::cout << "  " << cell.setting_id << " " << cell.procedure
                      << ": fdr=" << fahs::format_double(cell.fdr)
                      << " power=" << fahs::format_double(cell.mean_power) << " (n=" << cell.n
                      << ")\n";
        }
        if (errors > 0) {
            std::cerr << errors << " record(s) carry error markers; see records.csv\n";
            return kExitRuntime;
        }
    } catch (const fahs::error& e) {
        std::cerr << "error after record generation: " << e.what() << "\n";
        return kExitRuntime;  // records.csv kept if it was written
    }
    return 0;
}

void write_discovery_tables(const fahs::GeneRanking& ranking, const fs::path& out,
                            std::size_t top_k) {
    for (const auto& pr : ranking.per_procedure) {
        std::ofstream f(out / ("discoveries_" + pr.procedure + ".csv"));
        if (!f) throw fahs::io_error("cannot write discovery table for " + pr.procedure);
        f << "rank,gene,statistic,p,q,locfdr,beta_hat\n";
        std::size_t rank = 1;
        for (const auto& e : pr.entries) {
            auto opt_str = [](const std::optional<double>& v) {
                return v ? fahs::format_double(*v) : std::string();
            };
            f << rank++ << ',' << e.gene << ',' << fahs::format_double(e.statistic) << ','
              << opt_str(e.p) << ',' << opt_str(e.q) << ',' << opt_str(e.locfdr_value) << ','
              << opt_str(e.beta_hat) << '\n';
        }
    }

    std::ofstream f(out / "topk.csv");
    if (!f) throw fahs::io_error("cannot write topk.csv");
    f << "rank";
    for (const auto& pr : ranking.per_procedure) f << ',' << pr.procedure;
    f << '\n';
    for (std::size_t r = 0; r < top_k; ++r) {
        f << (r + 1);
        for (const auto& pr : ranking.per_procedure) {
            f << ',';
            if (r < pr.entries.size()) f << pr.entries[r].gene;
        }
        f << '\n';
    }
}

int cmd_analyze(const AnalyzeOptions& opt) {
    if (!(opt.gamma > 0.0 && opt.gamma < 1.0))
        throw fahs::config_error("gamma must lie in (0,1)");
    if (opt.as_matrix && opt.as_zscores)
        throw fahs::config_error("choose at most one of --matrix / --zscores");
    if (!fs::exists(opt.input)) throw fahs::io_error("input file '" + opt.input + "' not found");

    bool matrix_mode = opt.as_matrix;
    if (!opt.as_matrix && !opt.as_zscores) {
        // Sniff: multiple columns means an expression matrix.
        std::ifstream probe(opt.input);
        std::string first_line;
        std::getline(probe, first_line);
        matrix_mode = first_line.find(',') != std::string::npos;
    }

    fahs::ObservationVector z;
    if (matrix_mode) {
        const fahs::ExpressionMatrix matrix = fahs::read_expression_csv(opt.input);
        const fahs::TStatistics stats = fahs::t_statistics(matrix);
        for (std::size_t g : stats.constant_genes)
            std::cerr << "warning: gene " << (g + 1) << " is constant; t set to 0\n";
        z = fahs::z_transform(stats.t, stats.df);
        std::cout << "matrix: " << matrix.genes << " genes, " << matrix.subjects
                  << " subjects (split " << matrix.group_split << "/"
                  << (matrix.subjects - matrix.group_split) << "), t df = " << stats.df
                  << "\n";
    } else {
        z = fahs::read_zscore_csv(opt.input);
        std::cout << "z-scores: " << z.size() << " hypotheses\n";
    }

    fahs::GibbsConfig config;
    config.burn_in = opt.burn_in;
    config.samples = opt.samples;
    config.seed = opt.seed;

    const fahs::GeneRanking ranking =
        [&] {
            std::vector<fahs::Procedure> procs;
            for (const auto& name : opt.procedures)
                procs.push_back(fahs::procedure_from_string(name));
            return fahs::rank_genes(z, procs, opt.gamma, config);
        }();

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw fahs::config_error("cannot create output directory '" + opt.out_dir + "'");
    write_discovery_tables(ranking, opt.out_dir, opt.top_k);

    std::cout << "top " << opt.top_k << " genes at gamma = " << opt.gamma << ":\n";
    std::cout << "rank";
    for (const auto& pr : ranking.per_procedure) std::cout << '\t' << pr.procedure;
    std::cout << '\n';
    for (std::size_t r = 0; r < opt.top_k; ++r) {
        std::cout << (r + 1);
        for (const auto& pr : ranking.per_procedure) {
            std::cout << '\t';
            if (r < pr.entries.size()) std::cout << pr.entries[r].gene;
            else std::cout << '-';
        }
        std::cout << '\n';
    }
    for (const auto& pr : ranking.per_procedure) {
        std::cout << pr.procedure << ": " << pr.entries.size() << " discoveries";
        if (pr.xi_hat) std::cout << ", xi_hat = " << fahs::format_double(*pr.xi_hat);
        std::cout << '\n';
    }
    return 0;
}

int cmd_pdc(const PdcOptions& opt) {
    if (!(opt.xi > 0.0)) throw fahs::config_error("--xi must be positive");
    if (!(opt.threshold >= 0.0 && opt.threshold < 1.0))
        throw fahs::config_error("--threshold must lie in [0,1)");
    if (!fs::exists(opt.input)) throw fahs::io_error("input file '" + opt.input + "' not found");

    const fahs::ObservationVector y(fahs::read_numeric_column(opt.input));
    const fahs::PdcResult result =
        opt.averaged > 0
            ? fahs::pdc_check_averaged(y, opt.xi, opt.sigma_diag, opt.sigma_offdiag,
                                       opt.threshold, opt.seed, opt.averaged)
            : fahs::pdc_check(y, opt.xi, opt.sigma_diag, opt.sigma_offdiag, opt.threshold,
                              opt.seed);

    std::cout << "ybar = " << fahs::format_double(result.ybar)
              << ", predictive sd = " << fahs::format_double(result.predictive_sd)
              << ", tail probability = " << fahs::format_double(result.tail_probability)
              << ", threshold = " << fahs::format_double(result.threshold) << "\n";
    std::cout << (result.conflict ? "prior-data conflict detected"
                                  : "no prior-data conflict detected")
              << "\n";

    const json j{{"ybar", result.ybar},
                 {"predictive_sd", result.predictive_sd},
                 {"tail_probability", result.tail_probability},
                 {"threshold", result.threshold},
                 {"conflict", result.conflict},
                 {"averaged_draws", opt.averaged}};
    std::cout << j.dump() << "\n";
    return 0;  // the verdict is data, not a failure
}

int cmd_oracle_check(const OracleCheckOptions& opt) {
    if (!(opt.tol > 0.0)) throw fahs::config_error("--tol must be positive");
    double max_diff = 0.0;
    std::cout << "xi\ty\tgibbs\tquadrature\t|diff|\n";
    for (double xi : opt.xis) {
        if (!(xi > 0.0)) throw fahs::config_error("--xi entries must be positive");
        const fahs::ObservationVector y(std::vector<double>(opt.ys));
        fahs::GibbsConfig config;
        config.burn_in = opt.burn_in;
        config.samples = opt.samples;
        config.seed = opt.seed;
        config.xi_mode = fahs::XiMode::fixed;
        config.xi_value = xi;
        config.sigma_mode = fahs::SigmaMode::fixed;
        config.sigma_sq_value = 1.0;
        const fahs::PosteriorSummary summary = fahs::gibbs_run(y, config);
        for (std::size_t i = 0; i < opt.ys.size(); ++i) {
            const double oracle = fahs::posterior_beta_mean_quadrature(opt.ys[i], xi);
            const double diff = std::fabs(summary.beta_mean[i] - oracle);
            max_diff = std::max(max_diff, diff);
            std::cout << fahs::format_double(xi) << '\t' << fahs::format_double(opt.ys[i])
                      << '\t' << fahs::format_double(summary.beta_mean[i]) << '\t'
                      << fahs::format_double(oracle) << '\t' << fahs::format_double(diff)
                      << '\n';
        }
    }
    std::cout << "max |gibbs - quadrature| = " << fahs::format_double(max_diff)
              << " (tolerance " << fahs::format_double(opt.tol) << ")\n";
    if (max_diff > opt.tol) {
        std::cerr << "oracle check FAILED\n";
        return kExitRuntime;
    }
    std::cout << "oracle check passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FDR control for sparse normal means: BH, q-value, two-groups EB, and "
                 "frequentist-assisted horseshoe procedures"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fahs 0.1.0");
    app.set_config("--config", "", "Flat key=value file; subcommand options go under a "
                                   "[subcommand] section. Flags given on the command line "
                                   "override the file.");
    app.allow_config_extras(CLI::config_extras_mode::error);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Run the replication grid and write "
                                                    "records.csv / summary.csv");
    simulate->add_option("--preset", sim.preset, "desk or paper scale")
        ->check(CLI::IsMember({"desk", "paper"}));
    simulate->add_option("--out", sim.out_dir, "Output directory");
    simulate->add_option("--seed", sim.seed, "Base seed for the replication grid");
    simulate->add_option("--threads", sim.threads, "Worker threads (outputs do not depend on this)");
    simulate->add_option("--procedures", sim.procedures,
                         "Comma list: bh,qvalue,locfdr,ebhs,fbhs,mfahs,efahs,oracle")
        ->delimiter(',');
    simulate->add_option("--s", sim.s_list, "Signal proportions")->delimiter(',');
    simulate->add_option("--gamma", sim.gamma_list, "Nominal FDR levels")->delimiter(',');
    simulate->add_option("--rho", sim.rho_list, "Equicorrelations (0 = independent)")
        ->delimiter(',');
    simulate->add_option("--m", sim.m, "Hypotheses per replication");
    simulate->add_option("--reps", sim.replications, "Replications per setting");
    simulate->add_option("--snr", sim.snr, "Signal-to-noise ratio");
    simulate->add_option("--psi", sim.psi, "Slab standard deviation");
    simulate->add_option("--burn-in", sim.burn_in, "Gibbs burn-in sweeps");
    simulate->add_option("--samples", sim.samples, "Gibbs post-burn-in sweeps");
    simulate->add_option("--standardize", sim.standardize,
                         "Divide beta by the sd of 'all' entries or 'nonzero' only")
        ->check(CLI::IsMember({"all", "nonzero"}));
    simulate->add_flag("--svg", sim.svg, "Also write boxplots.svg");
    simulate->add_flag("--timing", sim.timing,
                       "Measure wall_ms per record (makes records.csv run-dependent)");
    simulate->add_flag("--no-pdc", sim.no_pdc, "Skip prior-data-conflict tails");
    simulate->add_option("--pdc-threshold", sim.pdc_threshold, "Conflict threshold");

    AnalyzeOptions ana;
    auto* analyze = app.add_subcommand("analyze", "Rank discoveries for an expression "
                                                  "matrix or z-score file");
    analyze->add_option("--input", ana.input, "CSV input")->required();
    analyze->add_flag("--matrix", ana.as_matrix, "Force expression-matrix parsing");
    analyze->add_flag("--zscores", ana.as_zscores, "Force single-column z-score parsing");
    analyze->add_option("--gamma", ana.gamma, "Nominal FDR level");
    analyze->add_option("--procedures", ana.procedures, "Comma list of procedures")
        ->delimiter(',');
    analyze->add_option("--seed", ana.seed, "Seed for the MCMC-based procedures");
    analyze->add_option("--burn-in", ana.burn_in, "Gibbs burn-in sweeps");
    analyze->add_option("--samples", ana.samples, "Gibbs post-burn-in sweeps");
    analyze->add_option("--top-k", ana.top_k, "Rows in the comparison table");
    analyze->add_option("--out", ana.out_dir, "Output directory");

    PdcOptions pdc;
    auto* pdc_cmd = app.add_subcommand("pdc", "Prior-data-conflict check for a y vector");
    pdc_cmd->add_option("--input", pdc.input, "Single-column CSV of observations")->required();
    pdc_cmd->add_option("--xi", pdc.xi, "Global shrinkage parameter")->required();
    pdc_cmd->add_option("--sigma-diag", pdc.sigma_diag, "Diagonal entry of Sigma")->required();
    pdc_cmd->add_option("--sigma-offdiag", pdc.sigma_offdiag, "Off-diagonal entry of Sigma")
        ->required();
    pdc_cmd->add_option("--threshold", pdc.threshold, "Conflict threshold");
    pdc_cmd->add_option("--seed", pdc.seed, "Seed for the local-scale draw");
    pdc_cmd->add_option("--averaged", pdc.averaged,
                        "Average the tail probability over K local-scale draws");

    OracleCheckOptions oc;
    auto* oracle_check = app.add_subcommand(
        "oracle-check", "Compare Gibbs posterior means against the quadrature oracle");
    oracle_check->add_option("--xi", oc.xis, "Fixed global scales")->delimiter(',');
    oracle_check->add_option("--y", oc.ys, "Observation grid")->delimiter(',');
    oracle_check->add_option("--burn-in", oc.burn_in, "Gibbs burn-in sweeps");
    oracle_check->add_option("--samples", oc.samples, "Gibbs post-burn-in sweeps");
    oracle_check->add_option("--seed", oc.seed, "Chain seed");
    oracle_check->add_option("--tol", oc.tol, "Maximum allowed |difference|");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (analyze->parsed()) return cmd_analyze(ana);
        if (pdc_cmd->parsed()) return cmd_pdc(pdc);
        if (oracle_check->parsed()) return cmd_oracle_check(oc);
    } catch (const fahs::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fahs::io_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
