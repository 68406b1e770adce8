#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fedadapt/errors.hpp"
#include "fedadapt/model_profile.hpp"

namespace fedadapt {

struct DeviceSpec {
    std::string id;
    double compute_rate = 0.0;  // FLOPs/second
    std::string label;
};

struct ServerSpec {
    double compute_rate = 0.0;  // FLOPs/second, per offloading device
    // Optional pessimistic policy: divide the server rate by the number of
    // devices currently offloading. Off by default; the reference model
    // treats the server rate as a fixed per-device constant.
    bool divide_among_active = false;
};

struct LinkSpec {
    double uplink_bps = 0.0;
    double downlink_bps = 0.0;
};

inline LinkSpec symmetric_link(double bps) { return {bps, bps}; }

struct CostBreakdown {
    double device_seconds = 0.0;
    double server_seconds = 0.0;
    double comm_seconds = 0.0;
    double total_seconds = 0.0;
};

// Time of one training iteration for a device split at `op`:
// device compute + server compute + transfer. Activations and labels travel
// on the uplink, gradient maps on the downlink. `active_devices` only
// matters when the server's divide_among_active policy is on.
inline CostBreakdown iteration_time(const ModelProfile& profile, const OffloadingPoint& op,
                                    const DeviceSpec& device, const ServerSpec& server,
                                    const LinkSpec& link, int active_devices = 1) {
    require(device.compute_rate > 0.0, ErrorCategory::InvalidArgument,
            "device compute_rate must be positive");
    require(server.compute_rate > 0.0, ErrorCategory::InvalidArgument,
            "server compute_rate must be positive");
    require(link.uplink_bps > 0.0 && link.downlink_bps > 0.0, ErrorCategory::InvalidArgument,
            "link bandwidth must be positive");

    const double workload = profile.workload_per_iteration();
    const double mu = op.device_fraction;

    CostBreakdown cost;
    cost.device_seconds = mu * workload / device.compute_rate;
    if (mu < 1.0) {
        double server_rate = server.compute_rate;
        if (server.divide_among_active && active_devices > 1) server_rate /= active_devices;
        cost.server_seconds = (1.0 - mu) * workload / server_rate;

        const double map_bytes = op.transfer_bytes_per_batch / 2.0 -
                                 kLabelBytes * profile.batch_size / 2.0;
        const double up_bytes = map_bytes + kLabelBytes * profile.batch_size;
        const double down_bytes = map_bytes;
        cost.comm_seconds = up_bytes * 8.0 / link.uplink_bps + down_bytes * 8.0 / link.downlink_bps;
    }
    cost.total_seconds = cost.device_seconds + cost.server_seconds + cost.comm_seconds;
    return cost;
}

// A device's rate follows from its measured device-native iteration time.
inline DeviceSpec calibrate_device(const ModelProfile& profile, double native_time_s,
                                   const std::string& id = "device",
                                   const std::string& label = "") {
    require(native_time_s > 0.0, ErrorCategory::InvalidArgument,
            "native iteration time must be positive");
    return DeviceSpec{id, profile.workload_per_iteration() / native_time_s, label};
}

struct SplitMeasurement {
    int op_index = 0;  // 1-based
    LinkSpec link;
    double total_seconds = 0.0;  // measured iteration time
};

struct ServerFit {
    ServerSpec server;
    double rms_residual_seconds = 0.0;
    double mean_abs_relative_error = 0.0;
};

// Least-squares fit of the server rate to measured split-training times.
// With x = 1/rate the prediction is linear: t_i = a_i + W*(1-mu_i)*x, so the
// optimum is closed-form.
inline ServerFit calibrate_server(const ModelProfile& profile,
                                  const std::vector<SplitMeasurement>& measurements,
                                  const DeviceSpec& device) {
    double sum_bb = 0.0;
    double sum_br = 0.0;
    int split_count = 0;
    const double workload = profile.workload_per_iteration();
    for (const auto& m : measurements) {
        const auto& op = profile.op(m.op_index);
        if (op.device_fraction >= 1.0) continue;
        ++split_count;
        const double mu = op.device_fraction;
        const double device_s = mu * workload / device.compute_rate;
        const double map_bytes = op.transfer_bytes_per_batch / 2.0 -
                                 kLabelBytes * profile.batch_size / 2.0;
        const double comm_s = (map_bytes + kLabelBytes * profile.batch_size) * 8.0 / m.link.uplink_bps +
                              map_bytes * 8.0 / m.link.downlink_bps;
        const double b = (1.0 - mu) * workload;
        const double r = m.total_seconds - device_s - comm_s;
        sum_bb += b * b;
        sum_br += b * r;
    }
    require(split_count > 0, ErrorCategory::InvalidArgument,
            "server calibration needs at least one split (non-native) measurement");
    require(sum_br > 0.0, ErrorCategory::InvalidArgument,
            "measurements imply a non-positive server rate");

    ServerFit fit;
    fit.server.compute_rate = sum_bb / sum_br;

    double sq_sum = 0.0;
    double rel_sum = 0.0;
    for (const auto& m : measurements) {
        const auto& op = profile.op(m.op_index);
        const double predicted =
            iteration_time(profile, op, device, fit.server, m.link).total_seconds;
        sq_sum += (predicted - m.total_seconds) * (predicted - m.total_seconds);
        rel_sum += std::abs(predicted - m.total_seconds) / m.total_seconds;
    }
    fit.rms_residual_seconds = std::sqrt(sq_sum / measurements.size());
    fit.mean_abs_relative_error = rel_sum / measurements.size();
    return fit;
}

// Argmin over the OP catalog; ties go to the larger device fraction
// (fewer bytes moved).
inline const OffloadingPoint& best_op(const ModelProfile& profile, const DeviceSpec& device,
                                      const ServerSpec& server, const LinkSpec& link) {
    const OffloadingPoint* best = nullptr;
    double best_total = 0.0;
    for (const auto& op : profile.offloading_points) {
        const double total = iteration_time(profile, op, device, server, link).total_seconds;
        if (best == nullptr || total <= best_total) {
            best = &op;
            best_total = total;
        }
    }
    return *best;
}

// --- one-round comparison across training methods ---------------------------

enum class TrainingMethod { ClassicFL, SplitLearning, SplitFed, FedAdapt };

struct MethodSpec {
    TrainingMethod method = TrainingMethod::ClassicFL;
    int uniform_op = 0;               // SL / SFL: shared OP index (1-based)
    std::vector<int> per_device_op;   // FedAdapt: one OP index per device
};

struct MethodCost {
    double device_flops_total = 0.0;  // summed over devices, one round
    double round_seconds = 0.0;
};

inline MethodCost method_comparison(const ModelProfile& profile,
                                    const std::vector<DeviceSpec>& devices,
                                    const ServerSpec& server, const std::vector<LinkSpec>& links,
                                    const MethodSpec& spec, int iterations_per_round = 1) {
    require(devices.size() == links.size(), ErrorCategory::InvalidArgument,
            "device and link lists must align");
    require(!devices.empty(), ErrorCategory::InvalidArgument, "need at least one device");

    const double workload = profile.workload_per_iteration();
    const auto op_for_device = [&](std::size_t k) -> const OffloadingPoint& {
        switch (spec.method) {
            case TrainingMethod::ClassicFL:
                return profile.op(profile.op_count());  // device native
            case TrainingMethod::SplitLearning:
            case TrainingMethod::SplitFed:
                return profile.op(spec.uniform_op);
            case TrainingMethod::FedAdapt:
                require(spec.per_device_op.size() == devices.size(),
                        ErrorCategory::InvalidArgument,
                        "FedAdapt comparison needs one OP per device");
                return profile.op(spec.per_device_op[k]);
        }
        return profile.op(profile.op_count());
    };

    MethodCost cost;
    double max_time = 0.0;
    double sum_time = 0.0;
    for (std::size_t k = 0; k < devices.size(); ++k) {
        const auto& op = op_for_device(k);
        const double t =
            iteration_time(profile, op, devices[k], server, links[k]).total_seconds;
        cost.device_flops_total += op.device_fraction * workload * iterations_per_round;
        max_time = std::max(max_time, t);
        sum_time += t;
    }
    const bool sequential = spec.method == TrainingMethod::SplitLearning;
    cost.round_seconds = (sequential ? sum_time : max_time) * iterations_per_round;
    return cost;
}

}  // namespace fedadapt
