// Command-line front end: runs the bundled studies or a JSON experiment
// config and writes CSV/SVG reports plus agent checkpoints.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedadapt/fedadapt.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fedadapt;

int verbosity() {
    const char* env = std::getenv("FEDADAPT_LOG");
    if (!env) return 1;
    const std::string v = env;
    if (v == "quiet" || v == "0") return 0;
    if (v == "debug" || v == "2") return 2;
    return 1;
}

void info(const std::string& message) {
    if (verbosity() >= 1) std::cout << message << "\n";
}

int exit_code(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::Config: return 2;
        case ErrorCategory::Io: return 3;
        case ErrorCategory::Checkpoint: return 4;
        case ErrorCategory::Scenario: return 5;
        case ErrorCategory::InvalidArgument: return 6;
        case ErrorCategory::Numeric: return 7;
    }
    return 10;
}

struct CliOptions {
    std::string config_path;
    std::string preset;
    std::string checkpoint;
    std::string output_dir;
    std::vector<std::uint64_t> seeds;
};

ExperimentConfig resolve_config(const CliOptions& cli, ExperimentMode mode) {
    ExperimentConfig config;
    if (!cli.config_path.empty()) {
        config = load_experiment_config(cli.config_path);
    } else if (!cli.preset.empty()) {
        config = experiment_preset(cli.preset);
    } else {
        throw Error(ErrorCategory::Config, "pass --config FILE or --preset NAME");
    }
    config.mode = mode;
    if (!cli.checkpoint.empty()) config.checkpoint = cli.checkpoint;
    if (!cli.output_dir.empty()) config.output_dir = cli.output_dir;
    if (!cli.seeds.empty()) config.seeds = cli.seeds;
    return config;
}

presets::OffloadStudy study_for_model(const std::string& model) {
    if (model == "vgg5") return presets::vgg5_offload_study();
    if (model == "vgg8") return presets::vgg8_offload_study();
    throw Error(ErrorCategory::Config, "sweep supports models vgg5 and vgg8, got " + model);
}

int run_sweep(const ExperimentConfig& config) {
    const auto study = study_for_model(config.model);
    const auto result = run_offload_sweep(study);
    emit_sweep_reports(result, config.output_dir, config.emit_csv, config.emit_svg);
    emit_method_comparison(study.profile, config.output_dir);
    info("sweep " + config.model + ": server fit " + format_double(result.server_rate) +
         " FLOP/s, MARE " + format_double(result.mean_abs_relative_error * 100.0) + "%");
    for (std::size_t b = 0; b < result.best_op_per_bandwidth.size(); ++b) {
        info("  best OP at " + study.bandwidths[b].label + ": OP" +
             std::to_string(result.best_op_per_bandwidth[b]));
    }
    return 0;
}

int run_train(const ExperimentConfig& config) {
    const auto runs = run_training(config.scenario, config.agent, config.seeds);
    emit_train_reports(runs, config.scenario.profile, config.output_dir, config.emit_csv,
                       config.emit_svg);
    for (std::size_t s = 0; s < runs.seeds.size(); ++s) {
        const auto path = fs::path(config.output_dir) /
                          ("checkpoint_seed" + std::to_string(runs.seeds[s]) + ".txt");
        save_checkpoint(runs.results[s].params, path.string());
    }
    const auto best = select_best_run(runs);
    save_checkpoint(runs.results[best].params,
                    (fs::path(config.output_dir) / "checkpoint_best.txt").string());
    info("trained " + std::to_string(runs.seeds.size()) + " agent(s) over " +
         std::to_string(config.scenario.total_rounds - 1) + " rounds; best seed " +
         std::to_string(runs.seeds[best]) + " (final reward " +
         format_double(final_training_reward(runs.results[best])) + "); reports in " +
         config.output_dir);
    return 0;
}

int run_deploy(const ExperimentConfig& config) {
    const auto params = load_checkpoint(config.checkpoint);
    fs::create_directories(config.output_dir);
    for (auto seed : config.seeds) {
        Scenario scenario = config.scenario;
        scenario.seed = seed;
        const auto record = deploy_agent(scenario, params, config.agent, config.overhead_seconds);
        if (config.emit_csv) {
            emit_deploy_csv(record, fs::path(config.output_dir) /
                                        ("rounds_seed" + std::to_string(seed) + ".csv"));
        }
        info("seed " + std::to_string(seed) + ": total " + format_double(record.total_seconds) +
             " s over " + std::to_string(record.rounds.size()) + " rounds");
    }
    return 0;
}

int run_compare_cli(const ExperimentConfig& config) {
    const auto params = load_checkpoint(config.checkpoint);
    const auto result = run_compare(config.scenario, params, config.agent, config.seeds,
                                    config.overhead_seconds);
    emit_compare_reports(result, config.scenario, config.output_dir, config.emit_csv,
                         config.emit_svg);
    info("rounds 0-49 time ratio (adaptive/classic): " +
         format_double(result.mean_first50_ratio));
    info("total time ratio: " + format_double(result.mean_total_ratio));
    return 0;
}

int run_cross_model_cli(const ExperimentConfig& config) {
    const auto params = load_checkpoint(config.checkpoint);
    const auto result = run_cross_model(config.scenario, params, config.agent, config.seeds,
                                        config.overhead_seconds);
    emit_cross_model_reports(result, config.scenario, config.output_dir, config.emit_csv,
                             config.emit_svg);
    info("uniform-bandwidth segment reduction: " +
         format_double(result.uniform_segment_reduction_percent) + "%");
    info("degraded-bandwidth segment reduction: " +
         format_double(result.degraded_segment_reduction_percent) + "%");
    int divergent = 0;
    for (const auto& s : result.compare.per_seed) divergent += s.oracle_divergent_device_rounds;
    info("device-rounds diverging from the per-round argmin oracle: " +
         std::to_string(divergent));
    return 0;
}

int run_report(const std::string& output_dir) {
    // Re-emit charts from an existing run directory's CSV records.
    require(fs::exists(output_dir), ErrorCategory::Io, "no such directory: " + output_dir);
    int regenerated = 0;
    for (const auto& entry : fs::directory_iterator(output_dir)) {
        if (entry.path().extension() != ".csv") continue;
        const auto name = entry.path().stem().string();
        if (name != "actions_mean") continue;
        std::ifstream in(entry.path());
        std::string line;
        std::getline(in, line);  // header
        std::map<int, ChartSeries> series;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string round, group, mean, lo, hi;
            std::getline(ls, round, ',');
            std::getline(ls, group, ',');
            std::getline(ls, mean, ',');
            std::getline(ls, lo, ',');
            std::getline(ls, hi, ',');
            auto& s = series[std::stoi(group)];
            s.label = "G" + group;
            s.points.emplace_back(std::stod(round), std::stod(mean));
            s.band_low.push_back(std::stod(lo));
            s.band_high.push_back(std::stod(hi));
        }
        if (series.empty()) continue;
        std::vector<ChartSeries> list;
        for (auto& [g, s] : series) list.push_back(std::move(s));
        ChartOptions options;
        options.title = "mean action per group";
        options.x_label = "round";
        options.y_label = "action";
        options.y_min = 0.0;
        options.y_max = 1.0;
        write_line_chart(fs::path(output_dir) / "actions.svg", list, options);
        ++regenerated;
    }
    info("regenerated " + std::to_string(regenerated) + " chart(s) in " + output_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator and RL decision engine for adaptive DNN-layer offloading in "
                 "federated learning"};
    app.require_subcommand(1);

    CliOptions cli;
    std::string sweep_model = "vgg5";
    std::string report_dir;

    const auto add_common = [&](CLI::App* cmd, bool with_checkpoint) {
        cmd->add_option("--config", cli.config_path, "experiment config file (JSON)");
        cmd->add_option("--preset", cli.preset, "named experiment preset");
        cmd->add_option("--out", cli.output_dir, "output directory");
        cmd->add_option("--seed", cli.seeds, "seed override (repeatable)");
        if (with_checkpoint) {
            cmd->add_option("--checkpoint", cli.checkpoint, "trained agent checkpoint");
        }
    };

    auto* sweep = app.add_subcommand("sweep", "offloading-point sweep against bundled measurements");
    sweep->add_option("--model", sweep_model, "vgg5 or vgg8");
    add_common(sweep, false);

    auto* train = app.add_subcommand("train", "train the offloading agent on a scenario");
    add_common(train, false);

    auto* deploy = app.add_subcommand("deploy", "run a trained agent over a scenario");
    add_common(deploy, true);

    auto* compare = app.add_subcommand("compare", "paired comparison against classic FL");
    add_common(compare, true);

    auto* cross = app.add_subcommand("cross-model",
                                     "deploy an agent trained for one model on another");
    add_common(cross, true);

    auto* report = app.add_subcommand("report", "regenerate charts from run CSVs");
    report->add_option("--dir", report_dir, "run output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            ExperimentConfig config;
            if (!cli.config_path.empty() || !cli.preset.empty()) {
                config = resolve_config(cli, ExperimentMode::OffloadSweep);
            } else {
                config = experiment_preset("sweep-" + sweep_model);
                if (!cli.output_dir.empty()) config.output_dir = cli.output_dir;
            }
            if (sweep->count("--model")) config.model = sweep_model;
            return run_sweep(config);
        }
        if (train->parsed()) return run_train(resolve_config(cli, ExperimentMode::TrainAgent));
        if (deploy->parsed()) return run_deploy(resolve_config(cli, ExperimentMode::DeployAgent));
        if (compare->parsed()) {
            return run_compare_cli(resolve_config(cli, ExperimentMode::CompareClassicFL));
        }
        if (cross->parsed()) {
            return run_cross_model_cli(resolve_config(cli, ExperimentMode::CrossModelReuse));
        }
        if (report->parsed()) return run_report(report_dir);
    } catch (const Error& e) {
        std::cerr << "{\"category\":\"" << category_name(e.category()) << "\",\"message\":\""
                  << e.what() << "\"}\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "{\"category\":\"internal\",\"message\":\"" << e.what() << "\"}\n";
        return 10;
    }
    return 0;
}
