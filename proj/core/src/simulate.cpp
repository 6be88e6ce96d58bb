#include "fahs/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "fahs/errors.hpp"
#include "fahs/fahs.hpp"
#include "fahs/prior_data_conflict.hpp"
#include "fahs/pvalue.hpp"
#include "fahs/rng.hpp"
#include "fahs/two_groups.hpp"

namespace fahs {

namespace {

// Substream layout for data generation: theta and beta substreams step by 4
// per regeneration attempt; noise streams are fixed.
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kSharedStream = 3;
constexpr int kMaxRegenerations = 64;

double sample_sd(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0));
}

// Draw theta and beta, standardize to sample sd = snr. Returns false when the
// draw is degenerate (no signals, or zero sd) and must be regenerated.
bool draw_signals(const SimulationSetting& setting, std::uint64_t seed, int attempt,
                  std::vector<double>& beta) {
    const std::size_t m = setting.m;
    Pcg32 theta_rng(seed, 4 * static_cast<std::uint64_t>(attempt));
    Pcg32 beta_rng(seed, 4 * static_cast<std::uint64_t>(attempt) + 1);

    beta.assign(m, 0.0);
    std::size_t signals = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const bool on = theta_rng.next_double() < setting.s;
        const double slab = setting.psi * normal_draw(beta_rng);
        if (on) {
            beta[j] = slab;
            ++signals;
        }
    }
    if (signals == 0) return false;

    double sd;
    if (setting.standardize == Standardize::all) {
        if (m < 2) return false;
        sd = sample_sd(beta);
    } else {
        if (signals < 2) return false;
        std::vector<double> nonzero;
        nonzero.reserve(signals);
        for (double b : beta)
            if (b != 0.0) nonzero.push_back(b);
        sd = sample_sd(nonzero);
    }
    if (!(sd > 0.0)) return false;

    const double scale = setting.snr / sd;
    for (double& b : beta) b *= scale;
    return true;
}

std::vector<double> make_beta(const SimulationSetting& setting, std::uint64_t seed) {
    std::vector<double> beta;
    if (setting.s == 0.0) {
        beta.assign(setting.m, 0.0);  // no-signal limit: standardization skipped
        return beta;
    }
    for (int attempt = 0; attempt < kMaxRegenerations; ++attempt) {
        if (draw_signals(setting, seed, attempt, beta)) return beta;
    }
    throw estimation_error("generate: degenerate signal draw persisted across substreams");
}

GeneratedData assemble(const SimulationSetting& setting, std::uint64_t seed, double rho) {
    std::vector<double> beta = make_beta(setting, seed);

    Pcg32 noise_rng(seed, kNoiseStream);
    std::vector<double> y(setting.m);
    if (rho == 0.0) {
        for (std::size_t j = 0; j < setting.m; ++j)
            y[j] = beta[j] + normal_draw(noise_rng);
    } else {
        Pcg32 shared_rng(seed, kSharedStream);
        const double z0 = normal_draw(shared_rng);
        const double w_shared = std::sqrt(rho);
        const double w_own = std::sqrt(1.0 - rho);
        for (std::size_t j = 0; j < setting.m; ++j)
            y[j] = beta[j] + w_shared * z0 + w_own * normal_draw(noise_rng);
    }

    GeneratedData data{
        ObservationVector(std::move(y),
                          rho > 0.0 ? std::optional<double>(rho) : std::nullopt),
        GroundTruth::from_beta(std::move(beta))};
    return data;
}

}  // namespace

const char* to_string(Procedure p) {
    switch (p) {
        case Procedure::bh: return "bh";
        case Procedure::qvalue: return "qvalue";
        case Procedure::locfdr: return "locfdr";
        case Procedure::ebhs: return "ebhs";
        case Procedure::fbhs: return "fbhs";
        case Procedure::mfahs: return "mfahs";
        case Procedure::efahs: return "efahs";
        case Procedure::oracle: return "oracle";
    }
    return "?";
}

Procedure procedure_from_string(const std::string& name) {
    for (Procedure p : {Procedure::bh, Procedure::qvalue, Procedure::locfdr, Procedure::ebhs,
                        Procedure::fbhs, Procedure::mfahs, Procedure::efahs,
                        Procedure::oracle}) {
        if (name == to_string(p)) return p;
    }
    throw config_error("unknown procedure '" + name + "'");
}

std::vector<Procedure> parse_procedures(const std::string& comma_list) {
    std::vector<Procedure> out;
    std::stringstream ss(comma_list);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) out.push_back(procedure_from_string(token));
    }
    if (out.empty()) throw config_error("procedure list is empty");
    return out;
}

std::string SimulationSetting::effective_id() const {
    if (!id.empty()) return id;
    std::ostringstream os;
    os << "m" << m << "_s" << s << "_g" << gamma << "_r" << rho;
    return os.str();
}

void SimulationSetting::validate() const {
    if (m < 1) throw config_error("setting: m must be >= 1");
    if (!(s >= 0.0 && s <= 1.0)) throw config_error("setting: s must lie in [0,1]");
    if (!(psi > 0.0)) throw config_error("setting: psi must be positive");
    if (!(snr > 0.0)) throw config_error("setting: snr must be positive");
    if (!(rho >= 0.0 && rho < 1.0)) throw config_error("setting: rho must lie in [0,1)");
    if (!(gamma > 0.0 && gamma < 1.0)) throw config_error("setting: gamma must lie in (0,1)");
    if (replications < 1) throw config_error("setting: replications must be >= 1");
    if (procedures.empty()) throw config_error("setting: no procedures requested");
    if (gibbs.samples < 1) throw config_error("setting: gibbs samples must be >= 1");
}

std::uint64_t replication_seed(const SimulationSetting& setting, std::size_t replication) {
    const std::uint64_t key = tag_hash(setting.effective_id());
    return child_seed(setting.base_seed, key, replication);
}

GeneratedData generate_independent(const SimulationSetting& setting, std::uint64_t seed) {
    if (setting.rho != 0.0)
        throw config_error("generate_independent: setting has rho != 0");
    return assemble(setting, seed, 0.0);
}

GeneratedData generate_equicorrelated(const SimulationSetting& setting, std::uint64_t seed) {
    if (!(setting.rho >= 0.0 && setting.rho < 1.0))
        throw config_error("generate_equicorrelated: rho must lie in [0,1)");
    return assemble(setting, seed, setting.rho);
}

GeneratedData generate_data(const SimulationSetting& setting, std::uint64_t seed) {
    return setting.rho == 0.0 ? generate_independent(setting, seed)
                              : generate_equicorrelated(setting, seed);
}

ReplicationRecord run_procedure(Procedure proc, const GeneratedData& data,
                                const SimulationSetting& setting, std::size_t replication,
                                std::uint64_t seed, bool timing) {
    ReplicationRecord rec;
    rec.setting_id = setting.effective_id();
    rec.replication = replication;
    rec.seed = seed;
    rec.procedure = to_string(proc);
    rec.s = setting.s;
    rec.gamma = setting.gamma;
    rec.rho = setting.rho;
    rec.m = setting.m;

    const auto start = std::chrono::steady_clock::now();
    try {
        DecisionVector decisions;
        switch (proc) {
            case Procedure::bh:
                decisions = bh_procedure(p_values(data.y), setting.gamma);
                break;
            case Procedure::qvalue:
                decisions = qvalue_procedure(p_values(data.y), setting.gamma);
                break;
            case Procedure::locfdr:
                decisions = locfdr_procedure(data.y, setting.gamma);
                break;
            case Procedure::ebhs: {
                GibbsConfig g = setting.gibbs;
                g.seed = derive_seed(seed, "ebhs");
                g.xi_mode = XiMode::mmle;
                g.sigma_mode = SigmaMode::jeffreys;
                const PosteriorSummary summary = gibbs_run(data.y, g);
                rec.xi_hat = summary.xi_mean;  // constant across sweeps in mmle mode
                decisions = hs_decision(summary, data.y);
                break;
            }
            case Procedure::fbhs: {
                GibbsConfig g = setting.gibbs;
                g.seed = derive_seed(seed, "fbhs");
                g.xi_mode = XiMode::full_bayes;
                g.sigma_mode = SigmaMode::jeffreys;
                const PosteriorSummary summary = gibbs_run(data.y, g);
                rec.xi_hat = summary.xi_mean;
                decisions = hs_decision(summary, data.y);
                break;
            }
            case Procedure::mfahs:
            case Procedure::efahs: {
                const FahsVariant variant =
                    proc == Procedure::mfahs ? FahsVariant::mfahs : FahsVariant::efahs;
                GibbsConfig g = setting.gibbs;
                g.seed = derive_seed(seed, to_string(proc));
                const FahsResult result = run_fahs(data.y, setting.gamma, variant, g);
                rec.xi_hat = result.xi_hat;
                decisions = result.decisions;
                if (setting.compute_pdc) {
                    const PdcResult pdc = pdc_check(
                        data.y, result.xi_hat, 1.0, setting.rho, setting.pdc_threshold,
                        derive_seed(seed, std::string("pdc/") + to_string(proc)));
                    rec.pdc_tail = pdc.tail_probability;
                }
                break;
            }
            case Procedure::oracle: {
                std::vector<bool> reject(data.truth.signal.begin(), data.truth.signal.end());
                decisions = DecisionVector(std::move(reject));
                break;
            }
        }

        const ConfusionTable table = confusion(decisions, data.truth);
        const FdpSummary fp = fdp_and_power(table);
        rec.R = table.R();
        rec.FD = table.FD;
        rec.TD = table.TD;
        rec.fdp = fp.fdp;
        rec.power = fp.power;
    } catch (const std::exception& e) {
        rec.error = e.what();
        rec.fdp = std::nan("");
        rec.power = std::nan("");
    }
    if (timing) {
        rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    }
    return rec;
}

std::vector<ReplicationRecord> run_grid(const std::vector<SimulationSetting>& settings,
                                        const GridOptions& options) {
    for (const auto& setting : settings) setting.validate();
    if (options.threads < 1) throw config_error("run_grid: threads must be >= 1");

    struct Task {
        std::size_t setting_index;
        std::size_t replication;
    };
    std::vector<Task> tasks;
    for (std::size_t si = 0; si < settings.size(); ++si) {
        for (std::size_t r = 0; r < settings[si].replications; ++r) tasks.push_back({si, r});
    }

    std::vector<std::vector<ReplicationRecord>> slots(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            const SimulationSetting& setting = settings[task.setting_index];
            const std::uint64_t seed = replication_seed(setting, task.replication);
            const GeneratedData data = generate_data(setting, seed);
            auto& out = slots[i];
            out.reserve(setting.procedures.size());
            for (Procedure proc : setting.procedures) {
                out.push_back(
                    run_procedure(proc, data, setting, task.replication, seed, options.timing));
            }
        }
    };

    const int n_workers = std::min<int>(options.threads, static_cast<int>(tasks.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<ReplicationRecord> records;
    for (auto& slot : slots) {
        for (auto& rec : slot) records.push_back(std::move(rec));
    }
    return records;
}

double quantile_type7(std::vector<double> sorted_values, double p) {
    if (sorted_values.empty()) throw domain_error("quantile_type7: empty input");
    const std::size_t n = sorted_values.size();
    if (n == 1) return sorted_values[0];
    const double h = (static_cast<double>(n) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, n - 1);
    const double frac = h - std::floor(h);
    return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac;
}

BoxStats box_stats(std::vector<double> values) {
    if (values.empty()) throw domain_error("box_stats: empty input");
    std::sort(values.begin(), values.end());
    BoxStats b;
    b.min = values.front();
    b.max = values.back();
    b.q1 = quantile_type7(values, 0.25);
    b.median = quantile_type7(values, 0.5);
    b.q3 = quantile_type7(values, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr;
    const double hi_fence = b.q3 + 1.5 * iqr;
    b.lo_whisker = b.max;
    b.hi_whisker = b.min;
    for (double v : values) {
        if (v >= lo_fence && v <= hi_fence) {
            b.lo_whisker = std::min(b.lo_whisker, v);
            b.hi_whisker = std::max(b.hi_whisker, v);
        } else {
            b.outliers.push_back(v);
        }
    }
    return b;
}

AggregateSummary aggregate(const std::vector<ReplicationRecord>& records) {
    AggregateSummary summary;
    // Preserve first-appearance order of (setting, procedure) cells.
    std::vector<std::pair<std::string, std::string>> keys;
    std::vector<std::vector<const ReplicationRecord*>> groups;
    for (const auto& rec : records) {
        if (rec.error) {
            ++summary.skipped_records;
            continue;
        }
        const std::pair<std::string, std::string> key{rec.setting_id, rec.procedure};
        std::size_t idx = keys.size();
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (keys[i] == key) {
                idx = i;
                break;
            }
        }
        if (idx == keys.size()) {
            keys.push_back(key);
            groups.emplace_back();
        }
        groups[idx].push_back(&rec);
    }

    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto& group = groups[i];
        AggregateCell cell;
        cell.setting_id = keys[i].first;
        cell.procedure = keys[i].second;
        cell.s = group.front()->s;
        cell.gamma = group.front()->gamma;
        cell.rho = group.front()->rho;
        cell.m = group.front()->m;
        cell.n = group.size();

        std::vector<double> fdps;
        fdps.reserve(group.size());
        double power_sum = 0.0;
        double xi_sum = 0.0;
        std::size_t xi_n = 0;
        for (const auto* rec : group) {
            fdps.push_back(rec->fdp);
            power_sum += rec->power;
            if (rec->xi_hat) {
                xi_sum += *rec->xi_hat;
                ++xi_n;
            }
        }
        double fdp_sum = 0.0;
        for (double f : fdps) fdp_sum += f;
        cell.fdr = fdp_sum / static_cast<double>(fdps.size());
        cell.mean_power = power_sum / static_cast<double>(group.size());
        cell.fdp_box = box_stats(fdps);
        if (xi_n > 0) cell.mean_xi_hat = xi_sum / static_cast<double>(xi_n);
        summary.cells.push_back(std::move(cell));
    }
    return summary;
}

}  // namespace fahs
