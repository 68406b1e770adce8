#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedadapt/errors.hpp"

namespace fedadapt {

// Per-layer training cost is counted as 3x the forward FLOPs (one forward
// plus two backward passes). The multiplier is uniform across layer kinds,
// so offloading-point workload fractions are independent of it.
inline constexpr double kTrainingFlopMultiplier = 3.0;
inline constexpr double kActivationElementBytes = 4.0;  // float32 maps
inline constexpr double kLabelBytes = 8.0;              // per-sample label

enum class LayerKind { Conv, MaxPool, FullyConnected };

inline const char* layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Conv: return "conv";
        case LayerKind::MaxPool: return "maxpool";
        case LayerKind::FullyConnected: return "fc";
    }
    return "unknown";
}

struct TensorShape {
    int height = 0;
    int width = 0;
    int channels = 0;

    long long elements() const {
        return static_cast<long long>(height) * width * channels;
    }
    bool operator==(const TensorShape&) const = default;
};

struct LayerSpec {
    LayerKind kind = LayerKind::Conv;
    int filters_or_neurons = 0;  // Conv: filters; FC: neurons; MaxPool: unused
    int kernel = 0;              // Conv: 3; MaxPool: 2; FC: 0
    TensorShape input_shape;
    TensorShape output_shape;
    double flops = 0.0;             // per sample, training (forward x multiplier)
    double activation_bytes = 0.0;  // output feature map, per sample
};

struct OffloadingPoint {
    int index = 0;        // 1-based OP number
    int after_layer = 0;  // 0-based index into ModelProfile::layers
    double device_fraction = 0.0;
    double transfer_bytes_per_batch = 0.0;  // activations + gradients + labels
};

struct ModelProfile {
    std::string name;
    std::vector<LayerSpec> layers;
    std::vector<OffloadingPoint> offloading_points;
    TensorShape input_shape;
    int batch_size = 0;

    // Total training workload per sample (houses the model's W up to batch scaling).
    double total_flops_per_sample() const {
        double sum = 0.0;
        for (const auto& layer : layers) sum += layer.flops;
        return sum;
    }

    // Workload of one training iteration (one batch).
    double workload_per_iteration() const { return total_flops_per_sample() * batch_size; }

    const OffloadingPoint& op(int index_1based) const {
        require(index_1based >= 1 && index_1based <= static_cast<int>(offloading_points.size()),
                ErrorCategory::InvalidArgument,
                "offloading point index out of range: " + std::to_string(index_1based));
        return offloading_points[static_cast<std::size_t>(index_1based - 1)];
    }

    int op_count() const { return static_cast<int>(offloading_points.size()); }

    // Midpoints between adjacent device fractions; used to map a continuous
    // action in [0,1] onto the OP catalog.
    std::vector<double> op_boundaries() const {
        std::vector<double> bounds;
        for (std::size_t i = 0; i + 1 < offloading_points.size(); ++i) {
            bounds.push_back(0.5 * (offloading_points[i].device_fraction +
                                    offloading_points[i + 1].device_fraction));
        }
        return bounds;
    }
};

// Forward FLOPs per sample from populated shapes. `multiplier` scales forward
// cost to training cost; pass 1.0 for forward-only accounting.
inline double layer_flops(const LayerSpec& layer, double multiplier = kTrainingFlopMultiplier) {
    require(layer.input_shape.elements() > 0 && layer.output_shape.elements() > 0,
            ErrorCategory::InvalidArgument, "layer has zero-sized shape");
    const auto& in = layer.input_shape;
    const auto& out = layer.output_shape;
    double forward = 0.0;
    switch (layer.kind) {
        case LayerKind::Conv:
            forward = 2.0 * layer.kernel * layer.kernel * in.channels *
                      static_cast<double>(out.height) * out.width * out.channels;
            break;
        case LayerKind::MaxPool:
            // Window comparisons counted as FLOPs.
            forward = static_cast<double>(out.height) * out.width * out.channels *
                      layer.kernel * layer.kernel;
            break;
        case LayerKind::FullyConnected:
            forward = 2.0 * static_cast<double>(in.elements()) * out.channels;
            break;
    }
    return forward * multiplier;
}

// Bytes exchanged per training iteration when splitting at `op`: forward
// activations and per-sample labels go up, gradient maps of the same shape
// come back. Device-native points transfer nothing.
inline double transfer_bytes(const ModelProfile& profile, const OffloadingPoint& op) {
    require(op.after_layer >= 0 && op.after_layer < static_cast<int>(profile.layers.size()),
            ErrorCategory::InvalidArgument, "offloading point does not belong to profile");
    if (op.after_layer == static_cast<int>(profile.layers.size()) - 1) return 0.0;
    const auto& boundary = profile.layers[static_cast<std::size_t>(op.after_layer)];
    const double map_bytes = boundary.activation_bytes * profile.batch_size;
    return 2.0 * map_bytes + kLabelBytes * profile.batch_size;
}

// Declarative layer list consumed by build_profile and the config loader.
struct LayerDef {
    LayerKind kind = LayerKind::Conv;
    int size = 0;  // Conv: filters; FC: neurons; MaxPool: ignored
    bool offloading_point = false;
};

inline ModelProfile build_profile(const std::string& name, TensorShape input_shape,
                                  int batch_size, const std::vector<LayerDef>& defs) {
    require(!defs.empty(), ErrorCategory::InvalidArgument, "profile needs at least one layer");
    require(batch_size > 0, ErrorCategory::InvalidArgument, "batch_size must be positive");
    require(input_shape.elements() > 0, ErrorCategory::InvalidArgument,
            "input shape must be non-empty");

    ModelProfile profile;
    profile.name = name;
    profile.input_shape = input_shape;
    profile.batch_size = batch_size;

    TensorShape shape = input_shape;
    for (const auto& def : defs) {
        LayerSpec layer;
        layer.kind = def.kind;
        layer.input_shape = shape;
        switch (def.kind) {
            case LayerKind::Conv:
                require(def.size > 0, ErrorCategory::InvalidArgument, "conv needs filters > 0");
                layer.filters_or_neurons = def.size;
                layer.kernel = 3;  // fixed 3x3, stride 1, same padding
                layer.output_shape = {shape.height, shape.width, def.size};
                break;
            case LayerKind::MaxPool:
                require(shape.height % 2 == 0 && shape.width % 2 == 0,
                        ErrorCategory::InvalidArgument,
                        "maxpool requires even spatial dims (2x2, stride 2)");
                layer.kernel = 2;
                layer.output_shape = {shape.height / 2, shape.width / 2, shape.channels};
                break;
            case LayerKind::FullyConnected:
                require(def.size > 0, ErrorCategory::InvalidArgument, "fc needs neurons > 0");
                layer.filters_or_neurons = def.size;
                layer.output_shape = {1, 1, def.size};
                break;
        }
        layer.flops = layer_flops(layer);
        layer.activation_bytes = layer.output_shape.elements() * kActivationElementBytes;
        profile.layers.push_back(layer);
        shape = layer.output_shape;
    }

    std::vector<int> op_layers;
    for (std::size_t i = 0; i < defs.size(); ++i) {
        if (defs[i].offloading_point) op_layers.push_back(static_cast<int>(i));
    }
    // The device-native point (everything on the device) is always present.
    if (op_layers.empty() || op_layers.back() != static_cast<int>(defs.size()) - 1) {
        op_layers.push_back(static_cast<int>(defs.size()) - 1);
    }

    const double total = profile.total_flops_per_sample();
    double cumulative = 0.0;
    int next_layer = 0;
    for (std::size_t i = 0; i < op_layers.size(); ++i) {
        for (; next_layer <= op_layers[i]; ++next_layer) {
            cumulative += profile.layers[static_cast<std::size_t>(next_layer)].flops;
        }
        OffloadingPoint op;
        op.index = static_cast<int>(i) + 1;
        op.after_layer = op_layers[i];
        op.device_fraction = cumulative / total;
        op.transfer_bytes_per_batch = transfer_bytes(profile, op);
        profile.offloading_points.push_back(op);
    }

    for (std::size_t i = 0; i + 1 < profile.offloading_points.size(); ++i) {
        require(profile.offloading_points[i].device_fraction <
                    profile.offloading_points[i + 1].device_fraction,
                ErrorCategory::InvalidArgument,
                "offloading-point fractions must be strictly increasing");
    }
    return profile;
}

// CIFAR-10 scale VGG-5: C32-MP(OP1)-C64-MP(OP2)-C64(OP3)-FC128-FC10(OP4).
inline ModelProfile build_vgg5() {
    return build_profile("vgg5", {32, 32, 3}, 100,
                         {{LayerKind::Conv, 32, false},
                          {LayerKind::MaxPool, 0, true},
                          {LayerKind::Conv, 64, false},
                          {LayerKind::MaxPool, 0, true},
                          {LayerKind::Conv, 64, true},
                          {LayerKind::FullyConnected, 128, false},
                          {LayerKind::FullyConnected, 10, true}});
}

// VGG-8: C32-C32-MP(OP1)-C64-C64-MP(OP2)-C128-C128(OP3)-FC128-FC10(OP4).
inline ModelProfile build_vgg8() {
    return build_profile("vgg8", {32, 32, 3}, 100,
                         {{LayerKind::Conv, 32, false},
                          {LayerKind::Conv, 32, false},
                          {LayerKind::MaxPool, 0, true},
                          {LayerKind::Conv, 64, false},
                          {LayerKind::Conv, 64, false},
                          {LayerKind::MaxPool, 0, true},
                          {LayerKind::Conv, 128, false},
                          {LayerKind::Conv, 128, true},
                          {LayerKind::FullyConnected, 128, false},
                          {LayerKind::FullyConnected, 10, true}});
}

// --- config serialization ---------------------------------------------------

inline nlohmann::json profile_to_json(const ModelProfile& profile) {
    nlohmann::json j;
    j["name"] = profile.name;
    j["input_shape"] = {profile.input_shape.height, profile.input_shape.width,
                        profile.input_shape.channels};
    j["batch_size"] = profile.batch_size;
    nlohmann::json layers = nlohmann::json::array();
    std::vector<bool> is_op(profile.layers.size(), false);
    for (const auto& op : profile.offloading_points) {
        is_op[static_cast<std::size_t>(op.after_layer)] = true;
    }
    for (std::size_t i = 0; i < profile.layers.size(); ++i) {
        const auto& layer = profile.layers[i];
        nlohmann::json entry;
        entry["kind"] = layer_kind_name(layer.kind);
        if (layer.kind == LayerKind::Conv) entry["filters"] = layer.filters_or_neurons;
        if (layer.kind == LayerKind::FullyConnected) entry["neurons"] = layer.filters_or_neurons;
        if (is_op[i]) entry["offloading_point"] = true;
        layers.push_back(entry);
    }
    j["layers"] = layers;
    return j;
}

inline ModelProfile profile_from_json(const nlohmann::json& j) {
    try {
        const auto shape_arr = j.at("input_shape");
        require(shape_arr.is_array() && shape_arr.size() == 3, ErrorCategory::Config,
                "input_shape must be [height, width, channels]");
        TensorShape input{shape_arr[0].get<int>(), shape_arr[1].get<int>(),
                          shape_arr[2].get<int>()};
        std::vector<LayerDef> defs;
        for (const auto& entry : j.at("layers")) {
            LayerDef def;
            const std::string kind = entry.at("kind").get<std::string>();
            if (kind == "conv") {
                def.kind = LayerKind::Conv;
                def.size = entry.at("filters").get<int>();
            } else if (kind == "maxpool") {
                def.kind = LayerKind::MaxPool;
            } else if (kind == "fc") {
                def.kind = LayerKind::FullyConnected;
                def.size = entry.at("neurons").get<int>();
            } else {
                throw Error(ErrorCategory::Config, "unknown layer kind: " + kind);
            }
            def.offloading_point = entry.value("offloading_point", false);
            defs.push_back(def);
        }
        return build_profile(j.at("name").get<std::string>(), input,
                             j.at("batch_size").get<int>(), defs);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::Config, std::string("bad model config: ") + e.what());
    }
}

inline ModelProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCategory::Io, "cannot open model config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::Config, "cannot parse " + path + ": " + e.what());
    }
    return profile_from_json(j);
}

inline void save_profile(const ModelProfile& profile, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), ErrorCategory::Io, "cannot write model config: " + path);
    out << profile_to_json(profile).dump(2) << "\n";
}

}  // namespace fedadapt
