#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fedadapt/cost_model.hpp"
#include "fedadapt/errors.hpp"
#include "fedadapt/model_profile.hpp"
#include "fedadapt/rng.hpp"

namespace fedadapt {

struct Scenario {
    ModelProfile profile;
    std::vector<DeviceSpec> devices;
    ServerSpec server;
    // bandwidth_trace[device][round]; every row must cover total_rounds.
    std::vector<std::vector<LinkSpec>> bandwidth_trace;
    int iterations_per_round = 100;  // 5 while the RL agent trains
    int total_rounds = 100;
    double noise = 0.0;  // relative std of multiplicative timing noise
    std::uint64_t seed = 1;

    void validate() const {
        require(!devices.empty(), ErrorCategory::Scenario, "scenario has no devices");
        require(iterations_per_round > 0, ErrorCategory::Scenario,
                "iterations_per_round must be positive");
        require(bandwidth_trace.size() == devices.size(), ErrorCategory::Scenario,
                "bandwidth trace must cover every device");
        for (const auto& row : bandwidth_trace) {
            require(static_cast<int>(row.size()) >= total_rounds, ErrorCategory::Scenario,
                    "bandwidth trace shorter than total_rounds");
        }
    }
};

struct OffloadingStrategy {
    std::vector<int> op_index;  // 1-based OP per device

    static OffloadingStrategy all_native(const Scenario& scenario) {
        return {std::vector<int>(scenario.devices.size(),
                                 scenario.profile.op_count())};
    }
};

struct DeviceObservation {
    std::string device_id;
    int op_index = 0;
    double iteration_seconds = 0.0;  // measured time per iteration
    double round_seconds = 0.0;
    double uplink_bps = 0.0;
    double downlink_bps = 0.0;
};

struct RoundObservation {
    int round = 0;
    std::vector<DeviceObservation> devices;
    double round_seconds = 0.0;  // max over devices (synchronous aggregation)
};

// Multiplicative lognormal timing noise, mean exactly 1, keyed by
// (seed, round, device) so a replay or a paired comparison arm sees
// identical draws regardless of strategy or call order.
class NoiseStream {
public:
    explicit NoiseStream(std::uint64_t seed) : seed_(seed) {}

    double factor(int round, std::size_t device_index, double rel_std) const {
        if (rel_std <= 0.0) return 1.0;
        RngStream rng(mix_seed(seed_, static_cast<std::uint64_t>(round) + 1,
                               static_cast<std::uint64_t>(device_index) + 1));
        const double sigma2 = std::log(1.0 + rel_std * rel_std);
        const double sigma = std::sqrt(sigma2);
        return std::exp(-0.5 * sigma2 + sigma * rng.normal());
    }

private:
    std::uint64_t seed_;
};

inline RoundObservation step(const Scenario& scenario, int round,
                             const OffloadingStrategy& strategy, const NoiseStream& noise) {
    scenario.validate();
    require(round >= 0 && round < scenario.total_rounds, ErrorCategory::InvalidArgument,
            "round out of range: " + std::to_string(round));
    require(strategy.op_index.size() == scenario.devices.size(), ErrorCategory::InvalidArgument,
            "strategy must assign one OP per device");

    int active = 0;
    for (int op : strategy.op_index) {
        require(op >= 1 && op <= scenario.profile.op_count(), ErrorCategory::InvalidArgument,
                "strategy contains an invalid OP index");
        if (scenario.profile.op(op).device_fraction < 1.0) ++active;
    }

    RoundObservation obs;
    obs.round = round;
    for (std::size_t k = 0; k < scenario.devices.size(); ++k) {
        const auto& link = scenario.bandwidth_trace[k][static_cast<std::size_t>(round)];
        const auto& op = scenario.profile.op(strategy.op_index[k]);
        const double iter_s =
            iteration_time(scenario.profile, op, scenario.devices[k], scenario.server, link,
                           active)
                .total_seconds;
        DeviceObservation dev;
        dev.device_id = scenario.devices[k].id;
        dev.op_index = op.index;
        dev.round_seconds =
            iter_s * scenario.iterations_per_round * noise.factor(round, k, scenario.noise);
        dev.iteration_seconds = dev.round_seconds / scenario.iterations_per_round;
        dev.uplink_bps = link.uplink_bps;
        dev.downlink_bps = link.downlink_bps;
        obs.devices.push_back(dev);
        obs.round_seconds = std::max(obs.round_seconds, dev.round_seconds);
    }
    return obs;
}

inline RoundObservation step(const Scenario& scenario, int round,
                             const OffloadingStrategy& strategy) {
    return step(scenario, round, strategy, NoiseStream(scenario.seed));
}

// Noiseless per-device round time with everything on the device; the
// reward normalizer and the classic-FL reference.
inline std::vector<double> baseline_times(const Scenario& scenario) {
    std::vector<double> base;
    const double workload = scenario.profile.workload_per_iteration();
    for (const auto& device : scenario.devices) {
        base.push_back(workload / device.compute_rate * scenario.iterations_per_round);
    }
    return base;
}

struct BandwidthSlot {
    std::string device_id;
    int round_start = 0;  // inclusive
    int round_end = 0;    // inclusive
};

// Constant base-rate trace with per-device windows where the uplink drops
// to drop_bps. Slots must not overlap per device.
inline std::vector<std::vector<LinkSpec>> make_bandwidth_schedule(
    const std::vector<std::string>& device_ids, int total_rounds, LinkSpec base, double drop_bps,
    const std::vector<BandwidthSlot>& slots) {
    std::vector<std::vector<LinkSpec>> trace(device_ids.size(),
                                             std::vector<LinkSpec>(total_rounds, base));
    for (std::size_t k = 0; k < device_ids.size(); ++k) {
        std::vector<std::pair<int, int>> windows;
        for (const auto& slot : slots) {
            if (slot.device_id != device_ids[k]) continue;
            require(slot.round_start <= slot.round_end, ErrorCategory::InvalidArgument,
                    "bandwidth slot must have start <= end");
            for (const auto& w : windows) {
                require(slot.round_end < w.first || slot.round_start > w.second,
                        ErrorCategory::InvalidArgument,
                        "overlapping bandwidth slots for device " + slot.device_id);
            }
            windows.emplace_back(slot.round_start, slot.round_end);
            for (int r = std::max(0, slot.round_start);
                 r <= std::min(total_rounds - 1, slot.round_end); ++r) {
                trace[k][static_cast<std::size_t>(r)].uplink_bps = drop_bps;
            }
        }
    }
    return trace;
}

}  // namespace fedadapt
