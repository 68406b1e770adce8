#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fedadapt/errors.hpp"
#include "fedadapt/rng.hpp"

namespace fedadapt {

enum class OutputTransform { Linear, Sigmoid };

// Dense network with tanh hidden layers and a flat parameter buffer
// (per layer: weights row-major [out][in], then biases). The flat layout
// keeps the optimizer, checkpointing, and finite-difference probes uniform.
class Mlp {
public:
    struct Cache {
        std::vector<std::vector<double>> activations;  // [0] = input, back() = output
    };

    Mlp() = default;

    Mlp(std::vector<int> layer_sizes, OutputTransform output, std::uint64_t seed,
        double output_layer_scale = 1.0)
        : sizes_(std::move(layer_sizes)), output_(output) {
        require(sizes_.size() >= 2, ErrorCategory::InvalidArgument,
                "network needs input and output layers");
        std::size_t count = 0;
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
            count += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] +
                     static_cast<std::size_t>(sizes_[l + 1]);
        }
        params_.assign(count, 0.0);

        RngStream rng(mix_seed(seed, 0x6d6c70ULL));
        std::size_t offset = 0;
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
            const int fan_in = sizes_[l];
            const int fan_out = sizes_[l + 1];
            double scale = std::sqrt(6.0 / (fan_in + fan_out));
            if (l + 2 == sizes_.size()) scale *= output_layer_scale;
            for (int i = 0; i < fan_in * fan_out; ++i) {
                params_[offset + static_cast<std::size_t>(i)] =
                    (2.0 * rng.uniform() - 1.0) * scale;
            }
            offset += static_cast<std::size_t>(fan_in) * fan_out +
                      static_cast<std::size_t>(fan_out);  // biases stay zero
        }
    }

    const std::vector<int>& layer_sizes() const { return sizes_; }
    OutputTransform output_transform() const { return output_; }
    int input_dim() const { return sizes_.front(); }
    int output_dim() const { return sizes_.back(); }

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    std::vector<double> forward(const std::vector<double>& input, Cache* cache = nullptr) const {
        require(static_cast<int>(input.size()) == sizes_.front(), ErrorCategory::InvalidArgument,
                "input dimension mismatch");
        if (cache) {
            cache->activations.clear();
            cache->activations.push_back(input);
        }
        std::vector<double> a = input;
        std::size_t offset = 0;
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
            const int n_in = sizes_[l];
            const int n_out = sizes_[l + 1];
            std::vector<double> z(static_cast<std::size_t>(n_out));
            for (int o = 0; o < n_out; ++o) {
                double sum = params_[offset + static_cast<std::size_t>(n_in) * n_out +
                                     static_cast<std::size_t>(o)];
                const std::size_t row = offset + static_cast<std::size_t>(o) * n_in;
                for (int i = 0; i < n_in; ++i) sum += params_[row + static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
                z[static_cast<std::size_t>(o)] = sum;
            }
            const bool last = (l + 2 == sizes_.size());
            for (auto& v : z) {
                if (!last) {
                    v = std::tanh(v);
                } else if (output_ == OutputTransform::Sigmoid) {
                    v = 1.0 / (1.0 + std::exp(-v));
                }
            }
            a = std::move(z);
            if (cache) cache->activations.push_back(a);
            offset += static_cast<std::size_t>(n_in) * n_out + static_cast<std::size_t>(n_out);
        }
        return a;
    }

    // Backpropagates dL/doutput (w.r.t. the post-transform output), adding
    // parameter gradients into grad (sized like params()). Optionally
    // returns dL/dinput.
    void backward(const Cache& cache, const std::vector<double>& d_output,
                  std::vector<double>& grad, std::vector<double>* d_input = nullptr) const {
        require(grad.size() == params_.size(), ErrorCategory::InvalidArgument,
                "gradient buffer size mismatch");
        const std::size_t layers = sizes_.size() - 1;
        std::vector<double> delta = d_output;

        // Output transform derivative.
        const auto& out_act = cache.activations.back();
        if (output_ == OutputTransform::Sigmoid) {
            for (std::size_t i = 0; i < delta.size(); ++i) {
                delta[i] *= out_act[i] * (1.0 - out_act[i]);
            }
        }

        std::vector<std::size_t> offsets(layers);
        std::size_t offset = 0;
        for (std::size_t l = 0; l < layers; ++l) {
            offsets[l] = offset;
            offset += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] +
                      static_cast<std::size_t>(sizes_[l + 1]);
        }

        for (std::size_t l = layers; l-- > 0;) {
            const int n_in = sizes_[l];
            const int n_out = sizes_[l + 1];
            const auto& a_prev = cache.activations[l];
            const std::size_t base = offsets[l];
            for (int o = 0; o < n_out; ++o) {
                const double d = delta[static_cast<std::size_t>(o)];
                const std::size_t row = base + static_cast<std::size_t>(o) * n_in;
                for (int i = 0; i < n_in; ++i) {
                    grad[row + static_cast<std::size_t>(i)] += d * a_prev[static_cast<std::size_t>(i)];
                }
                grad[base + static_cast<std::size_t>(n_in) * n_out + static_cast<std::size_t>(o)] += d;
            }
            if (l == 0 && d_input == nullptr) break;
            std::vector<double> prev_delta(static_cast<std::size_t>(n_in), 0.0);
            for (int i = 0; i < n_in; ++i) {
                double sum = 0.0;
                for (int o = 0; o < n_out; ++o) {
                    sum += params_[base + static_cast<std::size_t>(o) * n_in +
                                   static_cast<std::size_t>(i)] *
                           delta[static_cast<std::size_t>(o)];
                }
                prev_delta[static_cast<std::size_t>(i)] = sum;
            }
            if (l > 0) {
                // tanh' = 1 - a^2 on the hidden activation feeding this layer.
                for (int i = 0; i < n_in; ++i) {
                    const double a = cache.activations[l][static_cast<std::size_t>(i)];
                    prev_delta[static_cast<std::size_t>(i)] *= 1.0 - a * a;
                }
                delta = std::move(prev_delta);
            } else if (d_input) {
                *d_input = std::move(prev_delta);
            }
        }
    }

private:
    std::vector<int> sizes_;
    OutputTransform output_ = OutputTransform::Linear;
    std::vector<double> params_;
};

inline bool has_non_finite(const std::vector<double>& values) {
    for (double v : values) {
        if (!std::isfinite(v)) return true;
    }
    return false;
}

enum class OptimizerKind { Adam, Sgd };

// Adam with standard defaults, or plain SGD when configured.
class Optimizer {
public:
    Optimizer() = default;
    Optimizer(OptimizerKind kind, std::size_t param_count) : kind_(kind) {
        if (kind_ == OptimizerKind::Adam) {
            m_.assign(param_count, 0.0);
            v_.assign(param_count, 0.0);
        }
    }

    void step(std::vector<double>& params, const std::vector<double>& grad, double lr) {
        require(params.size() == grad.size(), ErrorCategory::InvalidArgument,
                "optimizer buffer mismatch");
        if (kind_ == OptimizerKind::Sgd) {
            for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
            return;
        }
        ++t_;
        const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = beta1 * m_[i] + (1.0 - beta1) * grad[i];
            v_[i] = beta2 * v_[i] + (1.0 - beta2) * grad[i] * grad[i];
            params[i] -= lr * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps);
        }
    }

private:
    OptimizerKind kind_ = OptimizerKind::Adam;
    std::vector<double> m_, v_;
    long t_ = 0;
};

}  // namespace fedadapt
