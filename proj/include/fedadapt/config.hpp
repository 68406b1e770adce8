#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedadapt/errors.hpp"
#include "fedadapt/presets.hpp"
#include "fedadapt/rl_core.hpp"
#include "fedadapt/sim_env.hpp"

namespace fedadapt {

enum class ExperimentMode { OffloadSweep, TrainAgent, DeployAgent, CompareClassicFL, CrossModelReuse };

inline ExperimentMode mode_from_string(const std::string& s) {
    if (s == "sweep") return ExperimentMode::OffloadSweep;
    if (s == "train") return ExperimentMode::TrainAgent;
    if (s == "deploy") return ExperimentMode::DeployAgent;
    if (s == "compare") return ExperimentMode::CompareClassicFL;
    if (s == "cross-model" || s == "cross_model") return ExperimentMode::CrossModelReuse;
    throw Error(ErrorCategory::Config, "unknown mode: " + s);
}

inline const char* mode_to_string(ExperimentMode m) {
    switch (m) {
        case ExperimentMode::OffloadSweep: return "sweep";
        case ExperimentMode::TrainAgent: return "train";
        case ExperimentMode::DeployAgent: return "deploy";
        case ExperimentMode::CompareClassicFL: return "compare";
        case ExperimentMode::CrossModelReuse: return "cross-model";
    }
    return "unknown";
}

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::OffloadSweep;
    std::string model = "vgg5";  // sweep and cross-model runs
    Scenario scenario;           // seed is overwritten per run from `seeds`
    bool has_scenario = false;
    AgentConfig agent;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::string output_dir = "out";
    std::string checkpoint;         // input for deploy/compare/cross-model
    double overhead_seconds = 0.0;  // additive per-round deployment overhead
    bool emit_csv = true;
    bool emit_svg = true;
};

namespace detail {

inline ModelProfile model_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "vgg5") return build_vgg5();
        if (name == "vgg8") return build_vgg8();
        throw Error(ErrorCategory::Config, "unknown model name: " + name);
    }
    if (j.is_object() && j.contains("file")) return load_profile(j.at("file").get<std::string>());
    return profile_from_json(j);
}

inline ServerSpec server_from_json(const nlohmann::json& j, const ModelProfile& profile) {
    if (j.contains("compute_rate")) {
        ServerSpec server;
        server.compute_rate = j.at("compute_rate").get<double>();
        server.divide_among_active = j.value("divide_among_active", false);
        return server;
    }
    if (j.contains("fit")) {
        const std::string which = j.at("fit").get<std::string>();
        if (which == "vgg5") return presets::vgg5_offload_study().server_fit.server;
        if (which == "vgg8") return presets::vgg8_offload_study().server_fit.server;
        throw Error(ErrorCategory::Config, "unknown server fit: " + which);
    }
    if (j.contains("measurements")) {
        require(j.contains("reference_device_native_seconds"), ErrorCategory::Config,
                "server measurements need reference_device_native_seconds");
        const auto device = calibrate_device(
            profile, j.at("reference_device_native_seconds").get<double>());
        std::vector<SplitMeasurement> ms;
        for (const auto& m : j.at("measurements")) {
            ms.push_back({m.at("op").get<int>(),
                          {m.at("uplink_mbps").get<double>() * 1e6,
                           m.at("downlink_mbps").get<double>() * 1e6},
                          m.at("seconds").get<double>()});
        }
        return calibrate_server(profile, ms, device).server;
    }
    throw Error(ErrorCategory::Config, "server needs compute_rate, fit, or measurements");
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    if (j.is_string() || (j.is_object() && j.contains("preset"))) {
        const std::string name = j.is_string() ? j.get<std::string>()
                                               : j.at("preset").get<std::string>();
        if (name == "heterogeneity") return presets::heterogeneity_training_scenario(1);
        if (name == "bandwidth") return presets::bandwidth_training_scenario(1);
        if (name == "schedule-train") return presets::schedule_training_scenario(1);
        if (name == "deploy-vgg5") return presets::deployment_scenario(1, "vgg5");
        if (name == "deploy-vgg8") return presets::deployment_scenario(1, "vgg8");
        throw Error(ErrorCategory::Config, "unknown scenario preset: " + name);
    }

    Scenario s;
    s.profile = model_from_json(j.at("model"));
    for (const auto& d : j.at("devices")) {
        const std::string id = d.at("id").get<std::string>();
        if (d.contains("compute_rate")) {
            s.devices.push_back({id, d.at("compute_rate").get<double>(), d.value("label", "")});
        } else {
            s.devices.push_back(calibrate_device(
                s.profile, d.at("native_iteration_seconds").get<double>(), id,
                d.value("label", "")));
        }
    }
    s.server = server_from_json(j.at("server"), s.profile);
    s.iterations_per_round = j.value("iterations_per_round", 100);
    s.total_rounds = j.value("total_rounds", 100);
    s.noise = j.value("noise", 0.05);
    s.seed = j.value("seed", 1);

    const auto& bw = j.at("bandwidth");
    LinkSpec base = symmetric_link(bw.value("base_mbps", 75.0) * 1e6);
    if (bw.contains("base_downlink_mbps")) {
        base.downlink_bps = bw.at("base_downlink_mbps").get<double>() * 1e6;
    }
    std::vector<BandwidthSlot> slots;
    if (bw.contains("slots")) {
        for (const auto& slot : bw.at("slots")) {
            slots.push_back({slot.at("device").get<std::string>(), slot.at("start").get<int>(),
                             slot.at("end").get<int>()});
        }
    }
    std::vector<std::string> ids;
    for (const auto& d : s.devices) ids.push_back(d.id);
    s.bandwidth_trace = make_bandwidth_schedule(ids, s.total_rounds, base,
                                                bw.value("drop_mbps", 10.0) * 1e6, slots);
    s.validate();
    return s;
}

inline AgentConfig agent_from_json(const nlohmann::json& j, AgentConfig config) {
    config.groups = j.value("groups", config.groups);
    if (j.contains("hidden")) config.hidden = j.at("hidden").get<std::vector<int>>();
    config.gamma = j.value("gamma", config.gamma);
    config.clip_epsilon = j.value("clip_epsilon", config.clip_epsilon);
    config.actor_lr = j.value("actor_lr", config.actor_lr);
    config.critic_lr = j.value("critic_lr", config.critic_lr);
    config.action_std_initial = j.value("action_std_initial", config.action_std_initial);
    config.std_decay_rate = j.value("std_decay_rate", config.std_decay_rate);
    config.std_decay_start_round = j.value("std_decay_start_round", config.std_decay_start_round);
    config.std_floor = j.value("std_floor", config.std_floor);
    config.update_every_rounds = j.value("update_every_rounds", config.update_every_rounds);
    config.epochs_per_update = j.value("epochs_per_update", config.epochs_per_update);
    config.normalize_advantages = j.value("normalize_advantages", config.normalize_advantages);
    if (j.contains("optimizer")) {
        const std::string opt = j.at("optimizer").get<std::string>();
        if (opt == "adam") {
            config.optimizer = OptimizerKind::Adam;
        } else if (opt == "sgd") {
            config.optimizer = OptimizerKind::Sgd;
        } else {
            throw Error(ErrorCategory::Config, "unknown optimizer: " + opt);
        }
    }
    if (j.contains("reward")) {
        const std::string mode = j.at("reward").get<std::string>();
        if (mode == "per_device") {
            config.reward_mode = RewardMode::MeanDeviceLogRatio;
        } else if (mode == "per_group") {
            config.reward_mode = RewardMode::MeanGroupLogRatio;
        } else {
            throw Error(ErrorCategory::Config, "unknown reward mode: " + mode);
        }
    }
    if (j.contains("recluster")) {
        const std::string mode = j.at("recluster").get<std::string>();
        if (mode == "every_round") {
            config.recluster = ReclusterMode::EveryRound;
        } else if (mode == "first_round") {
            config.recluster = ReclusterMode::FirstRound;
        } else {
            throw Error(ErrorCategory::Config, "unknown recluster mode: " + mode);
        }
    }
    config.low_bandwidth_threshold_bps =
        j.value("low_bandwidth_threshold_mbps",
                config.low_bandwidth_threshold_bps / 1e6) * 1e6;
    config.bandwidth_norm_cap_bps =
        j.value("bandwidth_norm_cap_mbps", config.bandwidth_norm_cap_bps / 1e6) * 1e6;
    return config;
}

}  // namespace detail

// Named experiment presets covering the bundled studies (the same shapes a
// config file can express).
inline ExperimentConfig experiment_preset(const std::string& name) {
    ExperimentConfig config;
    if (name == "sweep-vgg5" || name == "sweep-vgg8") {
        config.mode = ExperimentMode::OffloadSweep;
        config.model = name.substr(6);
        config.seeds = {1};
        return config;
    }
    if (name == "heterogeneity") {
        config.mode = ExperimentMode::TrainAgent;
        config.scenario = presets::heterogeneity_training_scenario(1);
        config.has_scenario = true;
        config.agent = presets::heterogeneity_agent_config();
        return config;
    }
    if (name == "bandwidth") {
        config.mode = ExperimentMode::TrainAgent;
        config.scenario = presets::bandwidth_training_scenario(1);
        config.has_scenario = true;
        config.agent = presets::bandwidth_agent_config();
        return config;
    }
    if (name == "schedule-train") {
        config.mode = ExperimentMode::TrainAgent;
        config.scenario = presets::schedule_training_scenario(1);
        config.has_scenario = true;
        config.agent = presets::schedule_agent_config();
        return config;
    }
    if (name == "compare") {
        config.mode = ExperimentMode::CompareClassicFL;
        config.scenario = presets::deployment_scenario(1, "vgg5");
        config.has_scenario = true;
        config.agent = presets::schedule_agent_config();
        return config;
    }
    if (name == "cross-model") {
        config.mode = ExperimentMode::CrossModelReuse;
        config.model = "vgg8";
        config.scenario = presets::deployment_scenario(1, "vgg8");
        config.has_scenario = true;
        config.agent = presets::schedule_agent_config();
        return config;
    }
    throw Error(ErrorCategory::Config, "unknown experiment preset: " + name);
}

inline std::vector<std::string> experiment_preset_names() {
    return {"sweep-vgg5", "sweep-vgg8", "heterogeneity", "bandwidth",
            "schedule-train", "compare", "cross-model"};
}

inline ExperimentConfig experiment_from_json(const nlohmann::json& j) {
    try {
        ExperimentConfig config;
        if (j.contains("preset")) {
            config = experiment_preset(j.at("preset").get<std::string>());
        } else {
            config.mode = mode_from_string(j.at("mode").get<std::string>());
        }
        if (j.contains("mode")) config.mode = mode_from_string(j.at("mode").get<std::string>());
        if (j.contains("model")) config.model = j.at("model").get<std::string>();
        if (j.contains("scenario")) {
            config.scenario = detail::scenario_from_json(j.at("scenario"));
            config.has_scenario = true;
        }
        if (j.contains("agent")) config.agent = detail::agent_from_json(j.at("agent"), config.agent);
        if (j.contains("seeds")) config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        require(!config.seeds.empty(), ErrorCategory::Config, "need at least one seed");
        config.output_dir = j.value("output_dir", config.output_dir);
        config.checkpoint = j.value("checkpoint", config.checkpoint);
        config.overhead_seconds = j.value("overhead_seconds", config.overhead_seconds);
        if (j.contains("reports")) {
            config.emit_csv = j.at("reports").value("csv", true);
            config.emit_svg = j.at("reports").value("svg", true);
        }
        const bool needs_scenario = config.mode != ExperimentMode::OffloadSweep;
        require(!needs_scenario || config.has_scenario, ErrorCategory::Config,
                "this mode requires a scenario (inline or preset)");
        const bool needs_checkpoint = config.mode == ExperimentMode::DeployAgent ||
                                      config.mode == ExperimentMode::CompareClassicFL ||
                                      config.mode == ExperimentMode::CrossModelReuse;
        require(!needs_checkpoint || !config.checkpoint.empty(), ErrorCategory::Config,
                "this mode requires a checkpoint path");
        return config;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::Config, std::string("bad experiment config: ") + e.what());
    }
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCategory::Io, "cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::Config, "cannot parse " + path + ": " + e.what());
    }
    return experiment_from_json(j);
}

}  // namespace fedadapt
