#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fedadapt/config.hpp"
#include "fedadapt/experiments.hpp"

using namespace fedadapt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("experiment config parses presets and overrides") {
    const auto j = nlohmann::json::parse(R"({
        "preset": "heterogeneity",
        "seeds": [3, 4],
        "output_dir": "custom_out"
    })");
    const auto config = experiment_from_json(j);
    CHECK(config.mode == ExperimentMode::TrainAgent);
    CHECK(config.seeds == std::vector<std::uint64_t>{3, 4});
    CHECK(config.output_dir == "custom_out");
    CHECK(config.scenario.iterations_per_round == 5);
    CHECK(config.agent.recluster == ReclusterMode::FirstRound);
}

TEST_CASE("inline scenarios build from json") {
    const auto j = nlohmann::json::parse(R"({
        "mode": "train",
        "scenario": {
            "model": "vgg5",
            "devices": [
                {"id": "a", "native_iteration_seconds": 1.0},
                {"id": "b", "native_iteration_seconds": 2.0}
            ],
            "server": {"compute_rate": 3.0e9},
            "bandwidth": {"base_mbps": 75, "drop_mbps": 10,
                          "slots": [{"device": "b", "start": 5, "end": 9}]},
            "iterations_per_round": 5,
            "total_rounds": 20,
            "noise": 0.0
        },
        "agent": {"groups": 2, "recluster": "every_round", "optimizer": "sgd"},
        "seeds": [1]
    })");
    const auto config = experiment_from_json(j);
    CHECK(config.scenario.devices.size() == 2);
    CHECK(config.scenario.bandwidth_trace[1][7].uplink_bps == 10e6);
    CHECK(config.scenario.bandwidth_trace[1][4].uplink_bps == 75e6);
    CHECK(config.agent.groups == 2);
    CHECK(config.agent.optimizer == OptimizerKind::Sgd);
    const double w = config.scenario.profile.workload_per_iteration();
    CHECK(config.scenario.devices[0].compute_rate == Catch::Approx(w / 1.0));
}

TEST_CASE("config validation rejects bad input") {
    CHECK_THROWS_AS(experiment_from_json(nlohmann::json::parse(R"({"mode": "fly"})")), Error);
    CHECK_THROWS_AS(experiment_from_json(nlohmann::json::parse(
                        R"({"mode": "train", "seeds": []})")),
                    Error);
    // compare without checkpoint
    CHECK_THROWS_AS(experiment_from_json(nlohmann::json::parse(
                        R"({"mode": "compare", "scenario": "deploy-vgg5"})")),
                    Error);
    // train without scenario
    CHECK_THROWS_AS(experiment_from_json(nlohmann::json::parse(R"({"mode": "train"})")), Error);
    CHECK_THROWS_AS(experiment_preset("nope"), Error);
    CHECK_THROWS_AS(load_experiment_config("/nonexistent/config.json"), Error);
}

TEST_CASE("server calibration from config-supplied measurements") {
    const auto j = nlohmann::json::parse(R"({
        "mode": "train",
        "scenario": {
            "model": "vgg5",
            "devices": [{"id": "a", "native_iteration_seconds": 4.36}],
            "server": {
                "reference_device_native_seconds": 4.36,
                "measurements": [
                    {"op": 1, "uplink_mbps": 75, "downlink_mbps": 75, "seconds": 2.38},
                    {"op": 2, "uplink_mbps": 75, "downlink_mbps": 75, "seconds": 3.61}
                ]
            },
            "bandwidth": {"base_mbps": 75},
            "total_rounds": 10
        },
        "seeds": [1]
    })");
    const auto config = experiment_from_json(j);
    CHECK(config.scenario.server.compute_rate > 1e9);
    CHECK(config.scenario.server.compute_rate < 1e10);
}

TEST_CASE("offload sweep reproduces the measured argmin pattern") {
    const auto vgg5 = run_offload_sweep(presets::vgg5_offload_study());
    CHECK(vgg5.best_op_per_bandwidth == std::vector<int>{1, 1, 1, 4});
    CHECK(vgg5.mean_abs_relative_error < 0.15);
    // WiFi reduction over native execution is substantial.
    CHECK(vgg5.reduction_percent[0] > 40.0);

    const auto vgg8 = run_offload_sweep(presets::vgg8_offload_study());
    CHECK(vgg8.best_op_per_bandwidth == std::vector<int>{1, 1, 1, 1});
    CHECK(vgg8.mean_abs_relative_error < 0.15);
    CHECK(vgg8.reduction_percent[0] > 50.0);
}

TEST_CASE("sweep cells agree with the measured optimum per bandwidth") {
    const auto result = run_offload_sweep(presets::vgg5_offload_study());
    for (const auto& cell : result.cells) {
        if (cell.best_predicted) {
            // Model argmin equals measured argmin in every column.
            CHECK(cell.best_measured);
        }
    }
}

TEST_CASE("report emission is deterministic and tolerates empty records") {
    const auto dir_a = fresh_dir("fedadapt_reports_a");
    const auto dir_b = fresh_dir("fedadapt_reports_b");

    const auto result = run_offload_sweep(presets::vgg5_offload_study());
    emit_sweep_reports(result, dir_a);
    emit_sweep_reports(result, dir_b);
    for (const auto* name : {"sweep_vgg5.csv", "sweep_vgg5_summary.csv", "sweep_vgg5.svg"}) {
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    }

    // Empty training runs produce a headers-only CSV and no chart.
    const auto dir_c = fresh_dir("fedadapt_reports_c");
    TrainRuns empty;
    emit_train_reports(empty, build_vgg5(), dir_c);
    CHECK(slurp(dir_c / "actions_mean.csv") == "round,group,mean,min,max\n");
    CHECK_FALSE(fs::exists(dir_c / "actions.svg"));

    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    fs::remove_all(dir_c);
}

TEST_CASE("training reports include per-round logs, clusters and charts") {
    auto scenario = presets::heterogeneity_training_scenario(1);
    scenario.total_rounds = 21;
    for (auto& row : scenario.bandwidth_trace) row.resize(21, symmetric_link(75e6));
    AgentConfig agent = presets::heterogeneity_agent_config();
    agent.epochs_per_update = 2;

    const auto runs = run_training(scenario, agent, {1, 2});
    const auto dir = fresh_dir("fedadapt_reports_train");
    emit_train_reports(runs, scenario.profile, dir);
    CHECK(fs::exists(dir / "train_log_seed1.csv"));
    CHECK(fs::exists(dir / "train_log_seed2.csv"));
    CHECK(fs::exists(dir / "clusters_seed1.csv"));
    CHECK(fs::exists(dir / "actions_mean.csv"));
    CHECK(fs::exists(dir / "actions.svg"));

    const auto log = slurp(dir / "train_log_seed1.csv");
    CHECK(log.find("round,group,mean_action,sampled_action,op,reward,std,round_seconds") == 0);
    const auto clusters = slurp(dir / "clusters_seed1.csv");
    CHECK(clusters.find("round,device,group,centroid") == 0);
    CHECK(clusters.find("jetson") != std::string::npos);

    // Identical runs emit byte-identical reports.
    const auto dir2 = fresh_dir("fedadapt_reports_train2");
    const auto runs2 = run_training(scenario, agent, {1, 2});
    emit_train_reports(runs2, scenario.profile, dir2);
    CHECK(slurp(dir / "train_log_seed1.csv") == slurp(dir2 / "train_log_seed1.csv"));
    CHECK(slurp(dir / "actions_mean.csv") == slurp(dir2 / "actions_mean.csv"));
    CHECK(slurp(dir / "actions.svg") == slurp(dir2 / "actions.svg"));
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("classic arm is always device native and paired with the adaptive arm") {
    auto scenario = presets::deployment_scenario(1);
    scenario.total_rounds = 12;
    for (auto& row : scenario.bandwidth_trace) row.resize(12);
    AgentConfig agent = presets::schedule_agent_config();
    const auto params = make_agent(agent, 5);

    const auto result = run_compare(scenario, params, agent, {1, 2});
    REQUIRE(result.per_seed.size() == 2);
    for (const auto& s : result.per_seed) {
        for (const auto& row : s.classic.rounds) {
            for (int op : row.device_op) CHECK(op == scenario.profile.op_count());
        }
        REQUIRE(s.adaptive.rounds.size() == 12);
        // Round 0 of the adaptive arm is the native probe: identical to the
        // classic arm because the noise draws are paired.
        CHECK(s.adaptive.rounds[0].round_seconds ==
              Catch::Approx(s.classic.rounds[0].round_seconds));
    }

    const auto dir = fresh_dir("fedadapt_reports_compare");
    emit_compare_reports(result, scenario, dir);
    CHECK(fs::exists(dir / "compare_summary.csv"));
    CHECK(fs::exists(dir / "compare_devices.csv"));
    CHECK(fs::exists(dir / "rounds_adaptive_seed1.csv"));
    CHECK(fs::exists(dir / "round_time.svg"));
    fs::remove_all(dir);
}

TEST_CASE("cross-model runs report per-segment reductions") {
    auto scenario = presets::deployment_scenario(1, "vgg8");
    scenario.total_rounds = 60;
    for (auto& row : scenario.bandwidth_trace) row.resize(60);
    AgentConfig agent = presets::schedule_agent_config();
    const auto params = make_agent(agent, 5);
    const auto result = run_cross_model(scenario, params, agent, {1});
    // Both segments present and finite; the split is rounds [0,50) vs [50,..).
    CHECK(std::isfinite(result.uniform_segment_reduction_percent));
    CHECK(std::isfinite(result.degraded_segment_reduction_percent));
    CHECK(result.compare.per_seed.size() == 1);

    const auto dir = fresh_dir("fedadapt_reports_cross");
    emit_cross_model_reports(result, scenario, dir);
    const auto segments = slurp(dir / "segments.csv");
    CHECK(segments.find("segment,reduction_percent") == 0);
    CHECK(segments.find("uniform_bandwidth") != std::string::npos);
    CHECK(segments.find("degraded_bandwidth") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("deploy rejects a checkpoint whose group count mismatches") {
    auto scenario = presets::deployment_scenario(1);
    scenario.total_rounds = 3;
    for (auto& row : scenario.bandwidth_trace) row.resize(3);
    AgentConfig two_groups = presets::schedule_agent_config();
    two_groups.groups = 2;
    const auto params = make_agent(two_groups, 5);
    AgentConfig three_groups = presets::schedule_agent_config();
    CHECK_THROWS_AS(deploy_agent(scenario, params, three_groups), Error);
}

TEST_CASE("method comparison table is emitted for the bundled testbed") {
    const auto dir = fresh_dir("fedadapt_reports_methods");
    emit_method_comparison(build_vgg5(), dir);
    const auto table = slurp(dir / "methods_vgg5.csv");
    CHECK(table.find("method,bandwidth,device_flops_total,round_seconds") == 0);
    CHECK(table.find("classic_fl") != std::string::npos);
    CHECK(table.find("split_learning") != std::string::npos);
    CHECK(table.find("split_fed") != std::string::npos);
    CHECK(table.find("fedadapt") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("per-device argmin strategies dominate the uniform methods") {
    const auto profile = build_vgg5();
    const auto server = presets::vgg5_offload_study().server_fit.server;
    std::vector<DeviceSpec> devices;
    for (const auto& d : presets::testbed_devices()) {
        devices.push_back(calibrate_device(profile, d.vgg5_native_iteration_s, d.id));
    }
    for (const auto& band : presets::reference_bandwidths()) {
        std::vector<LinkSpec> links(devices.size(), band.link);
        MethodSpec adaptive{TrainingMethod::FedAdapt, 0, {}};
        for (const auto& device : devices) {
            adaptive.per_device_op.push_back(best_op(profile, device, server, band.link).index);
        }
        const double chosen =
            method_comparison(profile, devices, server, links, adaptive).round_seconds;
        const double classic = method_comparison(profile, devices, server, links,
                                                 {TrainingMethod::ClassicFL, 0, {}})
                                   .round_seconds;
        CHECK(chosen <= classic + 1e-9);
        for (int op = 1; op <= profile.op_count(); ++op) {
            const double uniform = method_comparison(profile, devices, server, links,
                                                     {TrainingMethod::SplitFed, op, {}})
                                       .round_seconds;
            CHECK(chosen <= uniform + 1e-9);
        }
    }
}

TEST_CASE("report doubles round-trip exactly through their text form") {
    RngStream rng(17);
    for (int i = 0; i < 2000; ++i) {
        double v;
        switch (i % 4) {
            case 0: v = (rng.uniform() - 0.5) * 1e6; break;
            case 1: v = rng.uniform() * 1e-6; break;
            case 2: v = rng.normal() * 1e12; break;
            default: v = static_cast<double>(rng.next_u64() % 1000000); break;
        }
        const auto text = format_double(v);
        CHECK(std::stod(text) == v);
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("experiment configs load from files") {
    const auto dir = fresh_dir("fedadapt_config_file");
    const auto path = dir / "experiment.json";
    std::ofstream(path) << R"({"preset": "sweep-vgg8", "output_dir": "elsewhere"})";
    const auto config = load_experiment_config(path.string());
    CHECK(config.mode == ExperimentMode::OffloadSweep);
    CHECK(config.model == "vgg8");
    CHECK(config.output_dir == "elsewhere");

    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_experiment_config(path.string()), Error);
    fs::remove_all(dir);
}
