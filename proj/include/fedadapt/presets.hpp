#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fedadapt/cost_model.hpp"
#include "fedadapt/model_profile.hpp"
#include "fedadapt/rl_core.hpp"
#include "fedadapt/sim_env.hpp"

namespace fedadapt::presets {

// Bundled reference measurements from a physical IoT-to-workstation testbed
// (Raspberry Pi class devices plus one embedded-GPU board offloading to an
// x86 server over emulated links). All times are seconds per training
// iteration, averaged over independent runs; they drive calibration and the
// reproduction studies.

struct BandwidthSetting {
    std::string label;
    LinkSpec link;
};

// WiFi at two rates, then asymmetric mobile settings (uplink/downlink).
inline std::vector<BandwidthSetting> reference_bandwidths() {
    return {{"75Mbps", {75e6, 75e6}},
            {"50Mbps", {50e6, 50e6}},
            {"25Mbps", {25e6, 50e6}},
            {"10Mbps", {10e6, 20e6}}};
}

// measured[op-1][bandwidth], Pi4 1.5GHz device.
inline const std::array<std::array<double, 4>, 4>& vgg5_split_measurements() {
    static const std::array<std::array<double, 4>, 4> table{{{2.38, 2.70, 3.52, 6.07},
                                                             {3.61, 3.90, 4.36, 5.31},
                                                             {5.24, 5.26, 5.42, 6.73},
                                                             {4.36, 4.36, 4.36, 4.36}}};
    return table;
}

inline const std::array<std::array<double, 4>, 4>& vgg8_split_measurements() {
    static const std::array<std::array<double, 4>, 4> table{{{4.75, 5.29, 6.08, 8.84},
                                                             {7.52, 8.37, 8.32, 9.95},
                                                             {10.74, 11.98, 12.00, 15.93},
                                                             {10.61, 10.61, 10.61, 10.61}}};
    return table;
}

inline constexpr double kVgg5NativeSeconds = 4.36;
inline constexpr double kVgg8NativeSeconds = 10.61;

struct OffloadStudy {
    ModelProfile profile;
    DeviceSpec device;
    ServerFit server_fit;
    std::vector<BandwidthSetting> bandwidths;
    std::array<std::array<double, 4>, 4> measured;
};

namespace detail {

inline OffloadStudy make_study(ModelProfile profile, double native_seconds,
                               const std::array<std::array<double, 4>, 4>& measured) {
    OffloadStudy study;
    study.profile = std::move(profile);
    study.device = calibrate_device(study.profile, native_seconds, "pi4-1", "Pi4 1.5GHz");
    study.bandwidths = reference_bandwidths();
    study.measured = measured;
    std::vector<SplitMeasurement> ms;
    for (int op = 1; op <= study.profile.op_count(); ++op) {
        for (std::size_t b = 0; b < study.bandwidths.size(); ++b) {
            ms.push_back({op, study.bandwidths[b].link,
                          measured[static_cast<std::size_t>(op - 1)][b]});
        }
    }
    study.server_fit = calibrate_server(study.profile, ms, study.device);
    return study;
}

}  // namespace detail

inline OffloadStudy vgg5_offload_study() {
    return detail::make_study(build_vgg5(), kVgg5NativeSeconds, vgg5_split_measurements());
}

inline OffloadStudy vgg8_offload_study() {
    return detail::make_study(build_vgg8(), kVgg8NativeSeconds, vgg8_split_measurements());
}

// Five-device testbed with a deliberate straggler (Pi4 throttled to 0.7GHz).
struct TestbedDevice {
    std::string id;
    std::string label;
    double vgg5_native_iteration_s;
};

inline std::vector<TestbedDevice> testbed_devices() {
    return {{"jetson", "Jetson Xavier NX", 0.07},
            {"pi4-1", "Pi4 1.5GHz", 3.58},
            {"pi3-1", "Pi3 1.2GHz", 3.75},
            {"pi3-2", "Pi3 1.2GHz", 3.77},
            {"pi4-2", "Pi4 0.7GHz", 5.14}};
}

// Per-device split measurements on the testbed at 75Mbps (VGG-5).
// Columns: jetson, pi4-1, pi3 (both), pi4-2; rows OP1..OP4.
inline const std::array<std::array<double, 4>, 4>& vgg5_per_device_measurements() {
    static const std::array<std::array<double, 4>, 4> table{{{0.51, 2.38, 2.99, 2.63},
                                                             {0.28, 3.61, 3.97, 4.68},
                                                             {0.27, 5.24, 4.93, 5.88},
                                                             {0.17, 4.36, 4.47, 5.15}}};
    return table;
}

inline std::vector<double> vgg5_per_device_native_seconds() { return {0.17, 4.36, 4.47, 5.15}; }

inline constexpr double kWifiBps = 75e6;
inline constexpr double kDroppedUplinkBps = 10e6;
inline constexpr int kTruncatedIterations = 5;
inline constexpr int kDeployIterations = 100;
inline constexpr int kTrainingRounds = 500;  // agent-driven rounds; round 0 is the native probe

// Scale factor applied to VGG-5 device rates when simulating VGG-8 (from the
// Pi4 native times of the two models; per-device VGG-8 natives were not
// measured separately).
inline double vgg8_native_scale() { return kVgg8NativeSeconds / kVgg5NativeSeconds; }

namespace detail {

inline std::vector<DeviceSpec> scenario_devices(const ModelProfile& profile, double native_scale) {
    std::vector<DeviceSpec> devices;
    for (const auto& d : testbed_devices()) {
        devices.push_back(
            calibrate_device(profile, d.vgg5_native_iteration_s * native_scale, d.id, d.label));
    }
    return devices;
}

inline ServerSpec scenario_server(const ModelProfile& profile) {
    return profile.name == "vgg8" ? vgg8_offload_study().server_fit.server
                                  : vgg5_offload_study().server_fit.server;
}

}  // namespace detail

// Heterogeneity study: constant WiFi bandwidth, truncated rounds, clustering
// frozen after the first observation.
inline Scenario heterogeneity_training_scenario(std::uint64_t seed) {
    Scenario s;
    s.profile = build_vgg5();
    s.devices = detail::scenario_devices(s.profile, 1.0);
    s.server = detail::scenario_server(s.profile);
    s.total_rounds = kTrainingRounds + 1;
    s.iterations_per_round = kTruncatedIterations;
    s.noise = 0.05;
    s.seed = seed;
    s.bandwidth_trace.assign(
        s.devices.size(),
        std::vector<LinkSpec>(static_cast<std::size_t>(s.total_rounds), symmetric_link(kWifiBps)));
    return s;
}

inline AgentConfig heterogeneity_agent_config() {
    AgentConfig config;
    config.recluster = ReclusterMode::FirstRound;
    return config;
}

// Bandwidth-adaptation study: same testbed, pi3-2 capped to a 10Mbps uplink
// for the whole run, bandwidth-aware clustering refreshed every round.
inline Scenario bandwidth_training_scenario(std::uint64_t seed) {
    Scenario s = heterogeneity_training_scenario(seed);
    for (std::size_t k = 0; k < s.devices.size(); ++k) {
        if (s.devices[k].id != "pi3-2") continue;
        for (auto& link : s.bandwidth_trace[k]) link.uplink_bps = kDroppedUplinkBps;
    }
    return s;
}

inline AgentConfig bandwidth_agent_config() {
    AgentConfig config;
    config.recluster = ReclusterMode::EveryRound;
    return config;
}

// Staggered-drop deployment schedule: 50 rounds of clean WiFi, then five
// ten-round slots where one device at a time loses its uplink.
inline std::vector<BandwidthSlot> staggered_drop_slots(int offset = 0) {
    const std::vector<std::string> order{"jetson", "pi4-1", "pi4-2", "pi3-1", "pi3-2"};
    std::vector<BandwidthSlot> slots;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const int start = offset + 50 + static_cast<int>(i) * 10;
        slots.push_back({order[i], start, start + 9});
    }
    return slots;
}

// 100-round deployment scenario with the staggered-drop schedule.
inline Scenario deployment_scenario(std::uint64_t seed, const std::string& model = "vgg5") {
    Scenario s;
    s.profile = model == "vgg8" ? build_vgg8() : build_vgg5();
    const double scale = model == "vgg8" ? vgg8_native_scale() : 1.0;
    s.devices = detail::scenario_devices(s.profile, scale);
    s.server = detail::scenario_server(s.profile);
    s.total_rounds = 100;
    s.iterations_per_round = kDeployIterations;
    s.noise = 0.05;
    s.seed = seed;
    std::vector<std::string> ids;
    for (const auto& d : s.devices) ids.push_back(d.id);
    s.bandwidth_trace = make_bandwidth_schedule(ids, s.total_rounds, symmetric_link(kWifiBps),
                                                kDroppedUplinkBps, staggered_drop_slots());
    return s;
}

// Training counterpart of the deployment scenario: the 100-round schedule is
// tiled across the agent-driven rounds so the policy sees every slot/cluster
// combination it will face at deployment.
inline Scenario schedule_training_scenario(std::uint64_t seed) {
    Scenario s = heterogeneity_training_scenario(seed);
    std::vector<std::string> ids;
    for (const auto& d : s.devices) ids.push_back(d.id);
    std::vector<BandwidthSlot> slots;
    for (int tile = 0; tile * 100 < kTrainingRounds; ++tile) {
        // Agent-driven rounds start at 1; shift each tile accordingly.
        for (auto slot : staggered_drop_slots(1 + tile * 100)) slots.push_back(slot);
    }
    s.bandwidth_trace = make_bandwidth_schedule(ids, s.total_rounds, symmetric_link(kWifiBps),
                                                kDroppedUplinkBps, slots);
    return s;
}

inline AgentConfig schedule_agent_config() { return bandwidth_agent_config(); }

}  // namespace fedadapt::presets
