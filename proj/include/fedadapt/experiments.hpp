#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <map>
#include <string>
#include <vector>

#include "fedadapt/clustering.hpp"
#include "fedadapt/config.hpp"
#include "fedadapt/cost_model.hpp"
#include "fedadapt/errors.hpp"
#include "fedadapt/presets.hpp"
#include "fedadapt/reports.hpp"
#include "fedadapt/rl_core.hpp"
#include "fedadapt/sim_env.hpp"

namespace fedadapt {

namespace fs = std::filesystem;

// --- offloading-point sweep ----------------------------------------------------

struct SweepCell {
    int op_index = 0;
    std::string bandwidth;
    double predicted_seconds = 0.0;
    double measured_seconds = 0.0;
    bool best_predicted = false;
    bool best_measured = false;
};

struct SweepResult {
    std::string model;
    std::vector<SweepCell> cells;       // op-major, bandwidth-minor
    std::vector<int> best_op_per_bandwidth;
    std::vector<double> reduction_percent;  // best vs native, predicted
    double mean_abs_relative_error = 0.0;
    double server_rate = 0.0;
};

inline SweepResult run_offload_sweep(const presets::OffloadStudy& study) {
    SweepResult result;
    result.model = study.profile.name;
    result.server_rate = study.server_fit.server.compute_rate;

    const int ops = study.profile.op_count();
    const int bands = static_cast<int>(study.bandwidths.size());
    std::vector<std::vector<double>> predicted(static_cast<std::size_t>(ops),
                                               std::vector<double>(static_cast<std::size_t>(bands)));
    double rel_sum = 0.0;
    for (int op = 1; op <= ops; ++op) {
        for (int b = 0; b < bands; ++b) {
            const double t = iteration_time(study.profile, study.profile.op(op), study.device,
                                            study.server_fit.server, study.bandwidths[static_cast<std::size_t>(b)].link)
                                 .total_seconds;
            predicted[static_cast<std::size_t>(op - 1)][static_cast<std::size_t>(b)] = t;
            rel_sum += std::abs(t - study.measured[static_cast<std::size_t>(op - 1)][static_cast<std::size_t>(b)]) /
                       study.measured[static_cast<std::size_t>(op - 1)][static_cast<std::size_t>(b)];
        }
    }
    result.mean_abs_relative_error = rel_sum / (ops * bands);

    for (int b = 0; b < bands; ++b) {
        const auto& best =
            best_op(study.profile, study.device, study.server_fit.server,
                    study.bandwidths[static_cast<std::size_t>(b)].link);
        result.best_op_per_bandwidth.push_back(best.index);
        int best_measured = 1;
        for (int op = 2; op <= ops; ++op) {
            if (study.measured[static_cast<std::size_t>(op - 1)][static_cast<std::size_t>(b)] <
                study.measured[static_cast<std::size_t>(best_measured - 1)][static_cast<std::size_t>(b)]) {
                best_measured = op;
            }
        }
        const double native = predicted[static_cast<std::size_t>(ops - 1)][static_cast<std::size_t>(b)];
        const double best_t = predicted[static_cast<std::size_t>(best.index - 1)][static_cast<std::size_t>(b)];
        result.reduction_percent.push_back((native - best_t) / native * 100.0);
        for (int op = 1; op <= ops; ++op) {
            SweepCell cell;
            cell.op_index = op;
            cell.bandwidth = study.bandwidths[static_cast<std::size_t>(b)].label;
            cell.predicted_seconds = predicted[static_cast<std::size_t>(op - 1)][static_cast<std::size_t>(b)];
            cell.measured_seconds = study.measured[static_cast<std::size_t>(op - 1)][static_cast<std::size_t>(b)];
            cell.best_predicted = (op == best.index);
            cell.best_measured = (op == best_measured);
            result.cells.push_back(cell);
        }
    }
    return result;
}

inline void emit_sweep_reports(const SweepResult& result, const fs::path& dir, bool csv = true,
                               bool svg = true) {
    fs::create_directories(dir);
    if (csv) {
        CsvWriter cells(dir / ("sweep_" + result.model + ".csv"),
                        {"op", "bandwidth", "predicted_seconds", "measured_seconds",
                         "best_predicted", "best_measured"});
        for (const auto& c : result.cells) {
            cells.write_row({std::to_string(c.op_index), c.bandwidth,
                             format_double(c.predicted_seconds), format_double(c.measured_seconds),
                             c.best_predicted ? "1" : "0", c.best_measured ? "1" : "0"});
        }
        CsvWriter summary(dir / ("sweep_" + result.model + "_summary.csv"),
                          {"bandwidth", "best_op", "reduction_percent", "mare_percent"});
        std::vector<std::string> labels;
        for (const auto& c : result.cells) {
            if (std::find(labels.begin(), labels.end(), c.bandwidth) == labels.end()) {
                labels.push_back(c.bandwidth);
            }
        }
        for (std::size_t b = 0; b < labels.size(); ++b) {
            summary.write_row({labels[b], std::to_string(result.best_op_per_bandwidth[b]),
                               format_double(result.reduction_percent[b]),
                               format_double(result.mean_abs_relative_error * 100.0)});
        }
    }
    if (svg && !result.cells.empty()) {
        std::map<int, ChartSeries> per_op;
        std::map<std::string, int> band_index;
        for (const auto& c : result.cells) {
            if (!band_index.count(c.bandwidth)) {
                const int idx = static_cast<int>(band_index.size());
                band_index[c.bandwidth] = idx;
            }
            auto& series = per_op[c.op_index];
            series.label = "OP" + std::to_string(c.op_index);
            series.points.emplace_back(band_index[c.bandwidth], c.predicted_seconds);
        }
        std::vector<ChartSeries> series;
        for (auto& [op, s] : per_op) {
            std::sort(s.points.begin(), s.points.end());
            series.push_back(s);
        }
        ChartOptions options;
        options.title = result.model + " iteration time by offloading point";
        options.x_label = "bandwidth setting (index)";
        options.y_label = "seconds per iteration";
        write_line_chart(dir / ("sweep_" + result.model + ".svg"), series, options);
    }
}

// Four-method comparison table for the bundled testbed at each bandwidth.
inline void emit_method_comparison(const ModelProfile& profile, const fs::path& dir) {
    fs::create_directories(dir);
    const double scale = profile.name == "vgg8" ? presets::vgg8_native_scale() : 1.0;
    std::vector<DeviceSpec> devices;
    for (const auto& d : presets::testbed_devices()) {
        devices.push_back(
            calibrate_device(profile, d.vgg5_native_iteration_s * scale, d.id, d.label));
    }
    const ServerSpec server = profile.name == "vgg8"
                                  ? presets::vgg8_offload_study().server_fit.server
                                  : presets::vgg5_offload_study().server_fit.server;

    CsvWriter out(dir / ("methods_" + profile.name + ".csv"),
                  {"method", "bandwidth", "device_flops_total", "round_seconds"});
    for (const auto& band : presets::reference_bandwidths()) {
        std::vector<LinkSpec> links(devices.size(), band.link);
        const auto emit = [&](const std::string& name, const MethodSpec& spec) {
            const auto cost = method_comparison(profile, devices, server, links, spec);
            out.write_row({name, band.label, format_double(cost.device_flops_total),
                           format_double(cost.round_seconds)});
        };
        emit("classic_fl", {TrainingMethod::ClassicFL, 0, {}});
        emit("split_learning", {TrainingMethod::SplitLearning, 1, {}});
        emit("split_fed", {TrainingMethod::SplitFed, 1, {}});
        MethodSpec adaptive{TrainingMethod::FedAdapt, 0, {}};
        for (const auto& device : devices) {
            adaptive.per_device_op.push_back(
                best_op(profile, device, server, band.link).index);
        }
        emit("fedadapt", adaptive);
    }
}

// --- training runs ---------------------------------------------------------------

struct TrainRuns {
    std::vector<std::uint64_t> seeds;
    std::vector<TrainResult> results;  // aligned with seeds
};

inline TrainRuns run_training(const Scenario& scenario_template, const AgentConfig& agent,
                              const std::vector<std::uint64_t>& seeds) {
    TrainRuns runs;
    runs.seeds = seeds;
    std::vector<std::future<TrainResult>> futures;
    for (auto seed : seeds) {
        Scenario scenario = scenario_template;
        scenario.seed = seed;
        futures.push_back(std::async(std::launch::async, [scenario, agent] {
            return train_agent(scenario, agent);
        }));
    }
    for (auto& f : futures) runs.results.push_back(f.get());
    return runs;
}

// Mean training reward over the last tenth of the run; the deployment
// checkpoint is the seed that trained best.
inline double final_training_reward(const TrainResult& result) {
    const std::size_t n = result.log.size();
    const std::size_t window = std::max<std::size_t>(1, n / 10);
    double sum = 0.0;
    for (std::size_t i = n - window; i < n; ++i) sum += result.log[i].reward;
    return sum / window;
}

inline std::size_t select_best_run(const TrainRuns& runs) {
    require(!runs.results.empty(), ErrorCategory::InvalidArgument, "no training runs");
    std::size_t best = 0;
    double best_reward = final_training_reward(runs.results[0]);
    for (std::size_t s = 1; s < runs.results.size(); ++s) {
        const double reward = final_training_reward(runs.results[s]);
        if (reward > best_reward) {
            best_reward = reward;
            best = s;
        }
    }
    return best;
}

inline void emit_train_reports(const TrainRuns& runs, const ModelProfile& profile,
                               const fs::path& dir, bool csv = true, bool svg = true) {
    fs::create_directories(dir);
    if (csv) {
        for (std::size_t s = 0; s < runs.results.size(); ++s) {
            CsvWriter log(dir / ("train_log_seed" + std::to_string(runs.seeds[s]) + ".csv"),
                          {"round", "group", "mean_action", "sampled_action", "op", "reward",
                           "std", "round_seconds"});
            for (const auto& row : runs.results[s].log) {
                for (std::size_t g = 0; g < row.mean_actions.size(); ++g) {
                    const bool acted = g < row.group_ops.size();
                    log.write_row({std::to_string(row.round), std::to_string(g + 1),
                                   format_double(row.mean_actions[g]),
                                   format_double(row.sampled_actions[g]),
                                   acted ? std::to_string(row.group_ops[g]) : "",
                                   format_double(row.reward), format_double(row.action_std),
                                   format_double(row.round_seconds)});
                }
            }
            CsvWriter clusters(dir / ("clusters_seed" + std::to_string(runs.seeds[s]) + ".csv"),
                               {"round", "device", "group", "centroid"});
            for (const auto& row : runs.results[s].log) {
                for (std::size_t g = 0; g < row.groups.groups.size(); ++g) {
                    for (const auto& member : row.groups.groups[g].members) {
                        clusters.write_row({std::to_string(row.round), member,
                                            std::to_string(g + 1),
                                            format_double(row.groups.groups[g].centroid)});
                    }
                }
            }
        }
    }

    // Cross-seed mean action per group per round, with min/max band.
    const std::size_t rounds =
        runs.results.empty() ? 0 : runs.results.front().log.size();
    std::size_t groups = 0;
    for (const auto& r : runs.results) {
        if (!r.log.empty()) groups = std::max(groups, r.log.front().mean_actions.size());
    }
    if (csv) {
        CsvWriter mean_csv(dir / "actions_mean.csv",
                           {"round", "group", "mean", "min", "max"});
        for (std::size_t i = 0; i < rounds; ++i) {
            for (std::size_t g = 0; g < groups; ++g) {
                double sum = 0.0, lo = 1.0, hi = 0.0;
                for (const auto& r : runs.results) {
                    const double a = r.log[i].mean_actions[g];
                    sum += a;
                    lo = std::min(lo, a);
                    hi = std::max(hi, a);
                }
                mean_csv.write_row({std::to_string(runs.results.front().log[i].round),
                                    std::to_string(g + 1),
                                    format_double(sum / runs.results.size()), format_double(lo),
                                    format_double(hi)});
            }
        }
    }
    if (svg && rounds > 0) {
        std::vector<ChartSeries> series(groups);
        for (std::size_t g = 0; g < groups; ++g) {
            series[g].label = "G" + std::to_string(g + 1);
            for (std::size_t i = 0; i < rounds; ++i) {
                double sum = 0.0, lo = 1.0, hi = 0.0;
                for (const auto& r : runs.results) {
                    const double a = r.log[i].mean_actions[g];
                    sum += a;
                    lo = std::min(lo, a);
                    hi = std::max(hi, a);
                }
                series[g].points.emplace_back(runs.results.front().log[i].round,
                                              sum / runs.results.size());
                series[g].band_low.push_back(lo);
                series[g].band_high.push_back(hi);
            }
        }
        ChartOptions options;
        options.title = "mean action per group";
        options.x_label = "round";
        options.y_label = "action";
        options.y_min = 0.0;
        options.y_max = 1.0;
        options.horizontal_gridlines = profile.op_boundaries();
        write_line_chart(dir / "actions.svg", series, options);
    }
}

// --- deployment and comparison ---------------------------------------------------

struct DeployRound {
    int round = 0;
    std::vector<int> device_op;         // scenario device order
    std::vector<int> device_group;      // -1 when not grouped (round 0)
    std::vector<double> device_seconds;
    std::vector<double> device_uplink_bps;
    std::vector<double> group_centroids;
    std::vector<double> actions;        // agent means, one per group slot used
    double round_seconds = 0.0;
};

struct DeployRecord {
    std::vector<std::string> device_ids;
    std::vector<DeployRound> rounds;
    double total_seconds = 0.0;
};

// Runs a trained agent over a scenario: round 0 executes device-native to
// seed the observation loop, every later round re-clusters from the previous
// observation and applies the agent's deterministic strategy.
inline DeployRecord deploy_agent(const Scenario& scenario, const AgentParams& params,
                                 const AgentConfig& cluster_config, double overhead_s = 0.0) {
    scenario.validate();
    require(params.groups == cluster_config.groups, ErrorCategory::Scenario,
            "checkpoint group count does not match the configured group count");

    DeployRecord record;
    for (const auto& d : scenario.devices) record.device_ids.push_back(d.id);

    const auto baselines = baseline_times(scenario);
    std::map<std::string, double> baseline_iter;
    for (std::size_t k = 0; k < scenario.devices.size(); ++k) {
        baseline_iter[scenario.devices[k].id] = baselines[k] / scenario.iterations_per_round;
    }
    std::map<std::string, double> fraction;
    for (const auto& d : scenario.devices) fraction[d.id] = 1.0;

    const NoiseStream noise(scenario.seed);
    RoundObservation obs;
    for (int round = 0; round < scenario.total_rounds; ++round) {
        OffloadingStrategy strategy = OffloadingStrategy::all_native(scenario);
        DeployRound row;
        row.round = round;
        row.device_group.assign(scenario.devices.size(), -1);
        if (round > 0) {
            const auto groups = detail::cluster_for_mode(obs, cluster_config, scenario.seed);
            InferenceInputs inputs;
            inputs.observation = &obs;
            inputs.groups = &groups;
            inputs.profile = &scenario.profile;
            inputs.baseline_iteration_s = baseline_iter;
            inputs.current_fraction = fraction;
            strategy = infer_strategy(params, inputs, &row.actions);
            for (std::size_t g = 0; g < groups.groups.size(); ++g) {
                row.group_centroids.push_back(groups.groups[g].centroid);
                for (const auto& member : groups.groups[g].members) {
                    for (std::size_t k = 0; k < scenario.devices.size(); ++k) {
                        if (scenario.devices[k].id == member) {
                            row.device_group[k] = static_cast<int>(g);
                        }
                    }
                }
            }
        }
        obs = step(scenario, round, strategy, noise);
        for (std::size_t k = 0; k < scenario.devices.size(); ++k) {
            row.device_op.push_back(strategy.op_index[k]);
            row.device_seconds.push_back(obs.devices[k].round_seconds);
            row.device_uplink_bps.push_back(obs.devices[k].uplink_bps);
            fraction[scenario.devices[k].id] =
                scenario.profile.op(strategy.op_index[k]).device_fraction;
        }
        row.round_seconds = obs.round_seconds + (round > 0 ? overhead_s : 0.0);
        record.total_seconds += row.round_seconds;
        record.rounds.push_back(std::move(row));
    }
    return record;
}

// Classic federated learning arm: every device trains the full model locally.
inline DeployRecord run_classic_fl(const Scenario& scenario) {
    scenario.validate();
    DeployRecord record;
    for (const auto& d : scenario.devices) record.device_ids.push_back(d.id);
    const NoiseStream noise(scenario.seed);
    for (int round = 0; round < scenario.total_rounds; ++round) {
        const auto strategy = OffloadingStrategy::all_native(scenario);
        const auto obs = step(scenario, round, strategy, noise);
        DeployRound row;
        row.round = round;
        row.device_group.assign(scenario.devices.size(), -1);
        for (std::size_t k = 0; k < scenario.devices.size(); ++k) {
            row.device_op.push_back(strategy.op_index[k]);
            row.device_seconds.push_back(obs.devices[k].round_seconds);
            row.device_uplink_bps.push_back(obs.devices[k].uplink_bps);
        }
        row.round_seconds = obs.round_seconds;
        record.total_seconds += row.round_seconds;
        record.rounds.push_back(std::move(row));
    }
    return record;
}

struct CompareSeedResult {
    std::uint64_t seed = 0;
    DeployRecord adaptive;
    DeployRecord classic;
    double first50_ratio = 0.0;  // mean adaptive / mean classic over rounds 0-49
    double total_ratio = 0.0;
    int oracle_divergent_device_rounds = 0;
};

struct CompareResult {
    std::vector<CompareSeedResult> per_seed;
    double mean_first50_ratio = 0.0;
    double mean_total_ratio = 0.0;
    // device id -> (adaptive mean round seconds, classic mean round seconds)
    std::map<std::string, std::pair<double, double>> device_means;
};

namespace detail {

inline double mean_rounds(const DeployRecord& record, int from, int to_exclusive) {
    double sum = 0.0;
    int count = 0;
    for (const auto& row : record.rounds) {
        if (row.round >= from && row.round < to_exclusive) {
            sum += row.round_seconds;
            ++count;
        }
    }
    return count ? sum / count : 0.0;
}

}  // namespace detail

// Paired comparison of the trained agent against classic FL: both arms share
// the scenario's noise stream, so per-round deltas are strategy-only.
inline CompareResult run_compare(const Scenario& scenario_template, const AgentParams& params,
                                 const AgentConfig& cluster_config,
                                 const std::vector<std::uint64_t>& seeds,
                                 double overhead_s = 0.0) {
    CompareResult result;
    for (auto seed : seeds) {
        Scenario scenario = scenario_template;
        scenario.seed = seed;
        CompareSeedResult seed_result;
        seed_result.seed = seed;
        seed_result.adaptive = deploy_agent(scenario, params, cluster_config, overhead_s);
        seed_result.classic = run_classic_fl(scenario);

        const double first50_adaptive = detail::mean_rounds(seed_result.adaptive, 0, 50);
        const double first50_classic = detail::mean_rounds(seed_result.classic, 0, 50);
        seed_result.first50_ratio = first50_adaptive / first50_classic;
        seed_result.total_ratio =
            seed_result.adaptive.total_seconds / seed_result.classic.total_seconds;

        for (const auto& row : seed_result.adaptive.rounds) {
            if (row.round == 0) continue;
            for (std::size_t k = 0; k < scenario.devices.size(); ++k) {
                const auto& link = scenario.bandwidth_trace[k][static_cast<std::size_t>(row.round)];
                const auto& oracle =
                    best_op(scenario.profile, scenario.devices[k], scenario.server, link);
                if (oracle.index != row.device_op[k]) ++seed_result.oracle_divergent_device_rounds;
            }
        }
        result.per_seed.push_back(std::move(seed_result));
    }

    for (const auto& s : result.per_seed) {
        result.mean_first50_ratio += s.first50_ratio / result.per_seed.size();
        result.mean_total_ratio += s.total_ratio / result.per_seed.size();
    }
    const auto& ids = result.per_seed.front().adaptive.device_ids;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        double a = 0.0, c = 0.0;
        std::size_t n = 0;
        for (const auto& s : result.per_seed) {
            for (const auto& row : s.adaptive.rounds) {
                a += row.device_seconds[k];
                ++n;
            }
            for (const auto& row : s.classic.rounds) c += row.device_seconds[k];
        }
        result.device_means[ids[k]] = {a / n, c / n};
    }
    return result;
}

// Reuse of a checkpoint trained for one model on another model's scenario.
// The first half of the staggered-drop schedule is clean WiFi, so the two
// halves are reported separately; oracle divergences are counted per seed in
// the underlying comparison (informational, not a gate).
struct CrossModelResult {
    CompareResult compare;
    double uniform_segment_reduction_percent = 0.0;   // rounds 0-49
    double degraded_segment_reduction_percent = 0.0;  // rounds 50 onward
};

inline CrossModelResult run_cross_model(const Scenario& scenario_template,
                                        const AgentParams& params,
                                        const AgentConfig& cluster_config,
                                        const std::vector<std::uint64_t>& seeds,
                                        double overhead_s = 0.0) {
    CrossModelResult result;
    result.compare = run_compare(scenario_template, params, cluster_config, seeds, overhead_s);
    double adaptive_uniform = 0.0, classic_uniform = 0.0;
    double adaptive_degraded = 0.0, classic_degraded = 0.0;
    for (const auto& seed_result : result.compare.per_seed) {
        for (const auto& row : seed_result.adaptive.rounds) {
            (row.round < 50 ? adaptive_uniform : adaptive_degraded) += row.round_seconds;
        }
        for (const auto& row : seed_result.classic.rounds) {
            (row.round < 50 ? classic_uniform : classic_degraded) += row.round_seconds;
        }
    }
    result.uniform_segment_reduction_percent = (1.0 - adaptive_uniform / classic_uniform) * 100.0;
    if (classic_degraded > 0.0) {
        result.degraded_segment_reduction_percent =
            (1.0 - adaptive_degraded / classic_degraded) * 100.0;
    }
    return result;
}

inline void emit_deploy_csv(const DeployRecord& record, const fs::path& path) {
    CsvWriter out(path, {"round", "device", "group", "op", "device_seconds", "uplink_mbps",
                         "round_seconds"});
    for (const auto& row : record.rounds) {
        for (std::size_t k = 0; k < record.device_ids.size(); ++k) {
            out.write_row({std::to_string(row.round), record.device_ids[k],
                           row.device_group[k] >= 0 ? std::to_string(row.device_group[k] + 1) : "",
                           std::to_string(row.device_op[k]),
                           format_double(row.device_seconds[k]),
                           format_double(row.device_uplink_bps[k] / 1e6),
                           format_double(row.round_seconds)});
        }
    }
}

inline void emit_compare_reports(const CompareResult& result, const Scenario& scenario,
                                 const fs::path& dir, bool csv = true, bool svg = true) {
    fs::create_directories(dir);
    if (csv) {
        CsvWriter summary(dir / "compare_summary.csv",
                          {"seed", "first50_ratio", "total_ratio",
                           "oracle_divergent_device_rounds"});
        for (const auto& s : result.per_seed) {
            summary.write_row({std::to_string(s.seed), format_double(s.first50_ratio),
                               format_double(s.total_ratio),
                               std::to_string(s.oracle_divergent_device_rounds)});
        }
        CsvWriter devices(dir / "compare_devices.csv",
                          {"device", "adaptive_mean_round_seconds", "classic_mean_round_seconds",
                           "reduction_percent"});
        for (const auto& [id, means] : result.device_means) {
            devices.write_row({id, format_double(means.first), format_double(means.second),
                               format_double((means.second - means.first) / means.second * 100.0)});
        }
        for (const auto& s : result.per_seed) {
            emit_deploy_csv(s.adaptive,
                            dir / ("rounds_adaptive_seed" + std::to_string(s.seed) + ".csv"));
            emit_deploy_csv(s.classic,
                            dir / ("rounds_classic_seed" + std::to_string(s.seed) + ".csv"));
        }
    }
    if (svg && !result.per_seed.empty()) {
        ChartSeries adaptive, classic;
        adaptive.label = "adaptive offloading";
        classic.label = "classic FL";
        const auto& rounds = result.per_seed.front().adaptive.rounds;
        for (std::size_t i = 0; i < rounds.size(); ++i) {
            double a = 0.0, c = 0.0;
            for (const auto& s : result.per_seed) {
                a += s.adaptive.rounds[i].round_seconds / result.per_seed.size();
                c += s.classic.rounds[i].round_seconds / result.per_seed.size();
            }
            adaptive.points.emplace_back(rounds[i].round, a);
            classic.points.emplace_back(rounds[i].round, c);
        }
        ChartOptions options;
        options.title = "round training time";
        options.x_label = "round";
        options.y_label = "seconds";
        options.y_min = 0.0;
        for (const auto& slot : presets::staggered_drop_slots()) {
            if (slot.round_start < scenario.total_rounds) {
                options.vertical_markers.push_back(slot.round_start);
            }
        }
        write_line_chart(dir / "round_time.svg", {classic, adaptive}, options);
    }
}

inline void emit_cross_model_reports(const CrossModelResult& result, const Scenario& scenario,
                                     const fs::path& dir, bool csv = true, bool svg = true) {
    emit_compare_reports(result.compare, scenario, dir, csv, svg);
    if (csv) {
        CsvWriter segments(dir / "segments.csv", {"segment", "reduction_percent"});
        segments.write_row(
            {"uniform_bandwidth", format_double(result.uniform_segment_reduction_percent)});
        segments.write_row(
            {"degraded_bandwidth", format_double(result.degraded_segment_reduction_percent)});
    }
}

}  // namespace fedadapt
