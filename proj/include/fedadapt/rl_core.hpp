#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fedadapt/clustering.hpp"
#include "fedadapt/cost_model.hpp"
#include "fedadapt/errors.hpp"
#include "fedadapt/mlp.hpp"
#include "fedadapt/model_profile.hpp"
#include "fedadapt/rng.hpp"
#include "fedadapt/sim_env.hpp"

namespace fedadapt {

enum class RewardMode {
    MeanDeviceLogRatio,  // mean over devices of log(baseline / observed)
    MeanGroupLogRatio,   // same, over group representatives only
};

enum class ReclusterMode {
    EveryRound,  // bandwidth-aware clustering refreshed from each observation
    FirstRound,  // plain time clustering frozen after the first round
};

struct AgentConfig {
    int groups = 3;
    std::vector<int> hidden = {64, 32};
    double gamma = 0.9;
    double clip_epsilon = 0.2;
    double actor_lr = 1e-4;
    double critic_lr = 1e-4;
    double action_std_initial = 0.5;
    double std_decay_rate = 0.9;
    int std_decay_start_round = 200;
    double std_floor = 0.01;
    int update_every_rounds = 10;
    int epochs_per_update = 50;
    int minibatch_size = 1;  // optimizer steps per sample; 0 = full batch
    bool normalize_advantages = true;
    OptimizerKind optimizer = OptimizerKind::Adam;
    RewardMode reward_mode = RewardMode::MeanDeviceLogRatio;
    ReclusterMode recluster = ReclusterMode::EveryRound;
    double low_bandwidth_threshold_bps = 20e6;
    double bandwidth_norm_cap_bps = 100e6;
};

// Everything needed to act (and to continue training): the two networks,
// the exploration std and its schedule, and the PPO constants.
struct AgentParams {
    Mlp actor;   // state -> per-group action mean in [0,1]
    Mlp critic;  // state -> value estimate
    int groups = 0;
    double action_std = 0.5;
    double action_std_initial = 0.5;
    double std_decay_rate = 0.9;
    int std_decay_start_round = 200;
    double std_floor = 0.01;
    int update_every_rounds = 10;
    double gamma = 0.9;
    double clip_epsilon = 0.2;
    double actor_lr = 1e-4;
    double critic_lr = 1e-4;
    double bandwidth_norm_cap_bps = 100e6;

    int state_dim() const { return 3 * groups; }
};

inline AgentParams make_agent(const AgentConfig& config, std::uint64_t seed) {
    require(config.groups >= 1, ErrorCategory::InvalidArgument, "agent needs >= 1 group");
    AgentParams params;
    params.groups = config.groups;
    std::vector<int> actor_sizes{3 * config.groups};
    actor_sizes.insert(actor_sizes.end(), config.hidden.begin(), config.hidden.end());
    actor_sizes.push_back(config.groups);
    std::vector<int> critic_sizes{3 * config.groups};
    critic_sizes.insert(critic_sizes.end(), config.hidden.begin(), config.hidden.end());
    critic_sizes.push_back(1);
    // Small output-layer init keeps initial action means near 0.5.
    params.actor = Mlp(actor_sizes, OutputTransform::Sigmoid, mix_seed(seed, 1), 0.1);
    params.critic = Mlp(critic_sizes, OutputTransform::Linear, mix_seed(seed, 2), 1.0);
    params.action_std = config.action_std_initial;
    params.action_std_initial = config.action_std_initial;
    params.std_decay_rate = config.std_decay_rate;
    params.std_decay_start_round = config.std_decay_start_round;
    params.std_floor = config.std_floor;
    params.update_every_rounds = config.update_every_rounds;
    params.gamma = config.gamma;
    params.clip_epsilon = config.clip_epsilon;
    params.actor_lr = config.actor_lr;
    params.critic_lr = config.critic_lr;
    params.bandwidth_norm_cap_bps = config.bandwidth_norm_cap_bps;
    return params;
}

// --- state construction ------------------------------------------------------

// Per group, in group order: (normalized representative iteration time,
// normalized uplink bandwidth, device fraction currently deployed on the
// representative). Times are normalized by the largest per-device native
// baseline; bandwidth by a fixed cap. Everything is clamped to [0,1].
// Missing groups (fewer clusters than actor slots) contribute zero blocks.
inline std::vector<double> build_state(const RoundObservation& observation,
                                       const GroupAssignment& groups,
                                       const std::map<std::string, double>& baseline_iteration_s,
                                       const std::map<std::string, double>& current_fraction,
                                       int group_slots, double bandwidth_cap_bps) {
    require(static_cast<int>(groups.groups.size()) <= group_slots, ErrorCategory::Scenario,
            "more clusters than actor slots");
    double max_baseline = 0.0;
    for (const auto& [id, b] : baseline_iteration_s) max_baseline = std::max(max_baseline, b);
    require(max_baseline > 0.0, ErrorCategory::InvalidArgument, "baselines must be positive");

    const auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    std::vector<double> state(static_cast<std::size_t>(3 * group_slots), 0.0);
    for (std::size_t g = 0; g < groups.groups.size(); ++g) {
        const auto& rep = groups.groups[g].representative;
        const DeviceObservation* dev = nullptr;
        for (const auto& d : observation.devices) {
            if (d.device_id == rep) {
                dev = &d;
                break;
            }
        }
        require(dev != nullptr, ErrorCategory::Scenario,
                "representative " + rep + " missing from observation");
        state[3 * g + 0] = clamp01(dev->iteration_seconds / max_baseline);
        state[3 * g + 1] = clamp01(dev->uplink_bps / bandwidth_cap_bps);
        const auto frac = current_fraction.find(rep);
        state[3 * g + 2] = clamp01(frac == current_fraction.end() ? 1.0 : frac->second);
    }
    return state;
}

// --- acting ------------------------------------------------------------------

inline std::vector<double> actor_forward(const AgentParams& params,
                                         const std::vector<double>& state) {
    return params.actor.forward(state);
}

struct SampledAction {
    std::vector<double> action;      // clamped to [0,1]; what the environment executes
    std::vector<double> raw_action;  // unclamped Gaussian sample; what the policy math sees
    double log_prob = 0.0;           // joint log-density of the unclamped sample
};

inline double gaussian_log_prob(const std::vector<double>& action,
                                const std::vector<double>& means, double action_std) {
    double logp = 0.0;
    const double log_norm = std::log(action_std * std::sqrt(2.0 * 3.141592653589793238462643));
    for (std::size_t g = 0; g < means.size(); ++g) {
        const double d = action[g] - means[g];
        logp += -0.5 * d * d / (action_std * action_std) - log_norm;
    }
    return logp;
}

inline SampledAction sample_action(const std::vector<double>& means, double action_std,
                                   RngStream& rng) {
    require(action_std > 0.0, ErrorCategory::InvalidArgument, "action std must be positive");
    SampledAction out;
    out.action.reserve(means.size());
    out.raw_action.reserve(means.size());
    for (double mean : means) {
        const double raw = rng.normal(mean, action_std);
        out.raw_action.push_back(raw);
        out.action.push_back(std::clamp(raw, 0.0, 1.0));
    }
    out.log_prob = gaussian_log_prob(out.raw_action, means, action_std);
    return out;
}

// Nearest offloading point for a continuous action: boundaries are the
// midpoints of adjacent device fractions, and an action exactly on a
// boundary rounds up to the deeper (larger-index) OP.
inline const OffloadingPoint& action_to_op(double mu, const ModelProfile& profile) {
    require(mu >= 0.0 && mu <= 1.0, ErrorCategory::InvalidArgument,
            "action must lie in [0,1]");
    const auto bounds = profile.op_boundaries();
    int index = 1;
    for (double b : bounds) {
        if (mu < b) break;
        ++index;
    }
    return profile.op(index);
}

// --- reward ------------------------------------------------------------------

// Positive when a device beats its no-offloading baseline, negative when
// slower; zero exactly at the baseline.
inline double compute_reward(const RoundObservation& observation,
                             const std::map<std::string, double>& baseline_iteration_s,
                             const GroupAssignment& groups,
                             RewardMode mode = RewardMode::MeanDeviceLogRatio) {
    const auto log_ratio = [&](const DeviceObservation& dev) {
        const auto it = baseline_iteration_s.find(dev.device_id);
        require(it != baseline_iteration_s.end(), ErrorCategory::InvalidArgument,
                "baseline missing for device " + dev.device_id);
        require(it->second > 0.0 && dev.iteration_seconds > 0.0, ErrorCategory::InvalidArgument,
                "times must be positive");
        return std::log(it->second / dev.iteration_seconds);
    };

    if (mode == RewardMode::MeanDeviceLogRatio) {
        double sum = 0.0;
        for (const auto& dev : observation.devices) sum += log_ratio(dev);
        return sum / observation.devices.size();
    }

    require(!groups.groups.empty(), ErrorCategory::InvalidArgument,
            "group reward needs a group assignment");
    double sum = 0.0;
    for (const auto& group : groups.groups) {
        const DeviceObservation* rep = nullptr;
        for (const auto& d : observation.devices) {
            if (d.device_id == group.representative) {
                rep = &d;
                break;
            }
        }
        require(rep != nullptr, ErrorCategory::Scenario, "representative missing");
        sum += log_ratio(*rep);
    }
    return sum / groups.groups.size();
}

// --- PPO ---------------------------------------------------------------------

struct Trajectory {
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> actions;
    std::vector<double> log_probs;
    std::vector<double> rewards;
    std::vector<double> values;       // critic estimates at collection time
    std::vector<double> action_stds;  // sampling std per step
    double tail_value = 0.0;          // critic bootstrap for the state after the last step

    std::size_t size() const { return states.size(); }

    void push(std::vector<double> state, std::vector<double> action, double log_prob,
              double reward, double value, double action_std) {
        states.push_back(std::move(state));
        actions.push_back(std::move(action));
        log_probs.push_back(log_prob);
        rewards.push_back(reward);
        values.push_back(value);
        action_stds.push_back(action_std);
    }

    void clear() {
        states.clear();
        actions.clear();
        log_probs.clear();
        rewards.clear();
        values.clear();
        action_stds.clear();
        tail_value = 0.0;
    }
};

struct PpoDiagnostics {
    double first_actor_loss = 0.0;
    double last_actor_loss = 0.0;
    double first_critic_loss = 0.0;
    double last_critic_loss = 0.0;
};

// Clipped-surrogate PPO pass over one collected batch: discounted returns
// (bootstrapped with the critic's tail estimate), Monte-Carlo advantages
// against the collection-time values, `epochs` passes over both networks.
// Each pass steps the optimizer per minibatch; minibatch_size 0 means one
// full-batch step per pass. Optimizer state may be threaded through by the
// caller; standalone calls get fresh state.
inline AgentParams ppo_update(AgentParams params, const Trajectory& batch, int epochs,
                              bool normalize_advantages = true, Optimizer* actor_opt = nullptr,
                              Optimizer* critic_opt = nullptr, PpoDiagnostics* diag = nullptr,
                              int minibatch_size = 0, std::uint64_t shuffle_seed = 0) {
    const std::size_t n = batch.size();
    require(n > 0, ErrorCategory::InvalidArgument, "empty trajectory batch");
    const std::size_t mb = minibatch_size <= 0 ? n : static_cast<std::size_t>(minibatch_size);

    std::vector<double> returns(n);
    double tail = batch.tail_value;
    for (std::size_t i = n; i-- > 0;) {
        tail = batch.rewards[i] + params.gamma * tail;
        returns[i] = tail;
    }
    std::vector<double> advantages(n);
    for (std::size_t i = 0; i < n; ++i) advantages[i] = returns[i] - batch.values[i];
    if (normalize_advantages && n > 1) {
        double mean = 0.0;
        for (double a : advantages) mean += a;
        mean /= n;
        double var = 0.0;
        for (double a : advantages) var += (a - mean) * (a - mean);
        const double std_dev = std::sqrt(var / n);
        for (double& a : advantages) a = (a - mean) / (std_dev + 1e-8);
    }

    Optimizer local_actor(OptimizerKind::Adam, params.actor.params().size());
    Optimizer local_critic(OptimizerKind::Adam, params.critic.params().size());
    if (!actor_opt) actor_opt = &local_actor;
    if (!critic_opt) critic_opt = &local_critic;

    std::vector<double> actor_grad(params.actor.params().size());
    std::vector<double> critic_grad(params.critic.params().size());
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    RngStream shuffle_rng(mix_seed(shuffle_seed, 0x5af71eULL));

    for (int epoch = 0; epoch < epochs; ++epoch) {
        // Fresh sample order each pass keeps minibatch steps decorrelated.
        for (std::size_t i = n; i > 1; --i) {
            std::swap(order[i - 1], order[shuffle_rng.index(i)]);
        }
        double actor_loss = 0.0;
        double critic_loss = 0.0;
        for (std::size_t start = 0; start < n; start += mb) {
            const std::size_t end = std::min(n, start + mb);
            const double count = static_cast<double>(end - start);

            std::fill(actor_grad.begin(), actor_grad.end(), 0.0);
            for (std::size_t idx = start; idx < end; ++idx) {
                const std::size_t i = order[idx];
                Mlp::Cache cache;
                const auto means = params.actor.forward(batch.states[i], &cache);
                const double sigma = batch.action_stds[i];
                const double logp_new = gaussian_log_prob(batch.actions[i], means, sigma);
                const double ratio =
                    std::exp(std::clamp(logp_new - batch.log_probs[i], -30.0, 30.0));
                const double lo = 1.0 - params.clip_epsilon;
                const double hi = 1.0 + params.clip_epsilon;
                const double surr1 = ratio * advantages[i];
                const double surr2 = std::clamp(ratio, lo, hi) * advantages[i];
                actor_loss -= std::min(surr1, surr2) / n;

                double d_ratio;
                if (surr1 <= surr2) {
                    d_ratio = advantages[i];
                } else {
                    d_ratio = (ratio > lo && ratio < hi) ? advantages[i] : 0.0;
                }
                const double d_logp = -d_ratio * ratio / count;  // d(minibatch loss)/d(logp_new)
                // dlogp/dmean = (a - mean)/sigma^2.
                std::vector<double> d_means(means.size());
                for (std::size_t g = 0; g < means.size(); ++g) {
                    d_means[g] = d_logp * (batch.actions[i][g] - means[g]) / (sigma * sigma);
                }
                params.actor.backward(cache, d_means, actor_grad);
            }
            if (has_non_finite(actor_grad)) {
                throw Error(ErrorCategory::Numeric,
                            "NaN in actor gradient at epoch " + std::to_string(epoch));
            }
            actor_opt->step(params.actor.params(), actor_grad, params.actor_lr);

            std::fill(critic_grad.begin(), critic_grad.end(), 0.0);
            for (std::size_t idx = start; idx < end; ++idx) {
                const std::size_t i = order[idx];
                Mlp::Cache cache;
                const double v = params.critic.forward(batch.states[i], &cache)[0];
                const double err = v - returns[i];
                critic_loss += err * err / n;
                params.critic.backward(cache, {2.0 * err / count}, critic_grad);
            }
            if (has_non_finite(critic_grad)) {
                throw Error(ErrorCategory::Numeric,
                            "NaN in critic gradient at epoch " + std::to_string(epoch));
            }
            critic_opt->step(params.critic.params(), critic_grad, params.critic_lr);
        }

        if (diag) {
            if (epoch == 0) {
                diag->first_actor_loss = actor_loss;
                diag->first_critic_loss = critic_loss;
            }
            diag->last_actor_loss = actor_loss;
            diag->last_critic_loss = critic_loss;
        }
    }
    return params;
}

// Exploration schedule: untouched before the decay start round, then decayed
// once per update cycle down to the floor.
inline AgentParams decay_std(AgentParams params, int round) {
    require(round >= 0, ErrorCategory::InvalidArgument, "round must be non-negative");
    if (round < params.std_decay_start_round) {
        params.action_std = params.action_std_initial;
        return params;
    }
    const int cycles = (round - params.std_decay_start_round) / params.update_every_rounds + 1;
    params.action_std = std::max(
        params.std_floor, params.action_std_initial * std::pow(params.std_decay_rate, cycles));
    return params;
}

// --- inference ---------------------------------------------------------------

struct InferenceInputs {
    const RoundObservation* observation = nullptr;
    const GroupAssignment* groups = nullptr;
    const ModelProfile* profile = nullptr;
    std::map<std::string, double> baseline_iteration_s;
    std::map<std::string, double> current_fraction;
};

// Deterministic deployment path: mean actions (no sampling), one OP per
// group, every member of a group gets its group's OP.
inline OffloadingStrategy infer_strategy(const AgentParams& params, const InferenceInputs& in,
                                         std::vector<double>* actions_out = nullptr,
                                         std::vector<int>* group_ops_out = nullptr) {
    require(in.observation && in.groups && in.profile, ErrorCategory::InvalidArgument,
            "inference inputs incomplete");
    require(static_cast<int>(in.groups->groups.size()) <= params.groups, ErrorCategory::Scenario,
            "group count exceeds agent capacity");
    const auto state = build_state(*in.observation, *in.groups, in.baseline_iteration_s,
                                   in.current_fraction, params.groups,
                                   params.bandwidth_norm_cap_bps);
    const auto means = actor_forward(params, state);
    if (actions_out) *actions_out = means;

    OffloadingStrategy strategy;
    strategy.op_index.assign(in.observation->devices.size(), in.profile->op_count());
    std::vector<int> group_ops;
    for (std::size_t g = 0; g < in.groups->groups.size(); ++g) {
        const auto& op = action_to_op(means[g], *in.profile);
        group_ops.push_back(op.index);
        for (const auto& member : in.groups->groups[g].members) {
            bool found = false;
            for (std::size_t k = 0; k < in.observation->devices.size(); ++k) {
                if (in.observation->devices[k].device_id == member) {
                    strategy.op_index[k] = op.index;
                    found = true;
                    break;
                }
            }
            require(found, ErrorCategory::Scenario, "group member not in observation: " + member);
        }
    }
    if (group_ops_out) *group_ops_out = group_ops;
    return strategy;
}

// --- training loop -------------------------------------------------------------

struct TrainRoundLog {
    int round = 0;
    std::vector<double> mean_actions;
    std::vector<double> sampled_actions;
    std::vector<int> group_ops;
    GroupAssignment groups;  // assignment in effect when the action was taken
    double reward = 0.0;
    double action_std = 0.0;
    double round_seconds = 0.0;
};

struct TrainResult {
    AgentParams params;
    std::vector<TrainRoundLog> log;
    GroupAssignment final_groups;
    std::vector<double> baseline_iteration_s;  // per device, scenario order
};

namespace detail {

inline GroupAssignment cluster_for_mode(const RoundObservation& obs, const AgentConfig& config,
                                        std::uint64_t seed) {
    if (config.recluster == ReclusterMode::EveryRound) {
        return cluster_with_bandwidth(obs, config.groups, config.low_bandwidth_threshold_bps,
                                      seed);
    }
    std::vector<std::pair<std::string, double>> values;
    for (const auto& d : obs.devices) values.emplace_back(d.device_id, d.iteration_seconds);
    return kmeans_1d(values, config.groups, seed);
}

}  // namespace detail

// One RL step per FL round: observe, cluster, act, map actions to OPs, step
// the environment, collect the reward; PPO update every update cycle. Round 0
// runs device-native to seed the first observation, then every subsequent
// round is agent-driven.
inline TrainResult train_agent(const Scenario& scenario, const AgentConfig& config) {
    scenario.validate();
    require(scenario.total_rounds >= 2, ErrorCategory::Scenario,
            "training needs at least one agent-driven round");

    TrainResult result;
    result.params = make_agent(config, mix_seed(scenario.seed, 0xa6e47ULL));
    Optimizer actor_opt(config.optimizer, result.params.actor.params().size());
    Optimizer critic_opt(config.optimizer, result.params.critic.params().size());

    const auto baselines = baseline_times(scenario);
    std::map<std::string, double> baseline_iter;
    for (std::size_t k = 0; k < scenario.devices.size(); ++k) {
        baseline_iter[scenario.devices[k].id] = baselines[k] / scenario.iterations_per_round;
        result.baseline_iteration_s.push_back(baselines[k] / scenario.iterations_per_round);
    }

    const NoiseStream noise(scenario.seed);
    std::map<std::string, double> fraction;
    for (const auto& d : scenario.devices) fraction[d.id] = 1.0;

    auto obs = step(scenario, 0, OffloadingStrategy::all_native(scenario), noise);
    auto groups = detail::cluster_for_mode(obs, config, scenario.seed);
    auto state = build_state(obs, groups, baseline_iter, fraction, config.groups,
                             config.bandwidth_norm_cap_bps);

    Trajectory buffer;
    for (int round = 1; round < scenario.total_rounds; ++round) {
        result.params = decay_std(std::move(result.params), round);

        const auto means = actor_forward(result.params, state);
        RngStream action_rng(mix_seed(scenario.seed, static_cast<std::uint64_t>(round),
                                      0xac710eULL));
        const auto sampled = sample_action(means, result.params.action_std, action_rng);

        OffloadingStrategy strategy;
        strategy.op_index.assign(scenario.devices.size(), scenario.profile.op_count());
        std::vector<int> group_ops;
        for (std::size_t g = 0; g < groups.groups.size(); ++g) {
            const auto& op = action_to_op(sampled.action[g], scenario.profile);
            group_ops.push_back(op.index);
            for (const auto& member : groups.groups[g].members) {
                for (std::size_t k = 0; k < scenario.devices.size(); ++k) {
                    if (scenario.devices[k].id == member) {
                        strategy.op_index[k] = op.index;
                        fraction[member] = op.device_fraction;
                        break;
                    }
                }
            }
        }

        obs = step(scenario, round, strategy, noise);
        const double reward = compute_reward(obs, baseline_iter, groups, config.reward_mode);
        const double value = result.params.critic.forward(state)[0];
        buffer.push(state, sampled.raw_action, sampled.log_prob, reward, value,
                    result.params.action_std);

        TrainRoundLog row;
        row.round = round;
        row.mean_actions = means;
        row.sampled_actions = sampled.action;
        row.group_ops = group_ops;
        row.groups = groups;
        row.reward = reward;
        row.action_std = result.params.action_std;
        row.round_seconds = obs.round_seconds;
        result.log.push_back(std::move(row));

        if (config.recluster == ReclusterMode::EveryRound) {
            groups = detail::cluster_for_mode(obs, config, scenario.seed);
        }
        state = build_state(obs, groups, baseline_iter, fraction, config.groups,
                            config.bandwidth_norm_cap_bps);

        if (static_cast<int>(buffer.size()) == config.update_every_rounds) {
            buffer.tail_value = result.params.critic.forward(state)[0];
            result.params = ppo_update(std::move(result.params), buffer,
                                       config.epochs_per_update, config.normalize_advantages,
                                       &actor_opt, &critic_opt, nullptr, config.minibatch_size,
                                       mix_seed(scenario.seed, static_cast<std::uint64_t>(round)));
            buffer.clear();
        }
    }
    result.final_groups = groups;
    return result;
}

// --- checkpointing -------------------------------------------------------------

namespace detail {

inline std::string hex_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

inline double parse_double(const std::string& token, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    require(end != nullptr && *end == '\0' && !token.empty(), ErrorCategory::Checkpoint,
            "bad numeric field in checkpoint: " + what);
    return v;
}

}  // namespace detail

inline constexpr const char* kCheckpointMagic = "fedadapt-agent v1";

// Versioned text checkpoint; doubles are written as hex floats so a
// save/load cycle is bit-exact.
inline void save_checkpoint(const AgentParams& params, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), ErrorCategory::Io, "cannot write checkpoint: " + path);
    out << kCheckpointMagic << "\n";
    out << "groups " << params.groups << "\n";
    out << "hidden";
    const auto& sizes = params.actor.layer_sizes();
    for (std::size_t i = 1; i + 1 < sizes.size(); ++i) out << " " << sizes[i];
    out << "\n";
    out << "action_std " << detail::hex_double(params.action_std) << "\n";
    out << "action_std_initial " << detail::hex_double(params.action_std_initial) << "\n";
    out << "std_decay_rate " << detail::hex_double(params.std_decay_rate) << "\n";
    out << "std_decay_start_round " << params.std_decay_start_round << "\n";
    out << "std_floor " << detail::hex_double(params.std_floor) << "\n";
    out << "update_every_rounds " << params.update_every_rounds << "\n";
    out << "gamma " << detail::hex_double(params.gamma) << "\n";
    out << "clip_epsilon " << detail::hex_double(params.clip_epsilon) << "\n";
    out << "actor_lr " << detail::hex_double(params.actor_lr) << "\n";
    out << "critic_lr " << detail::hex_double(params.critic_lr) << "\n";
    out << "bandwidth_norm_cap_bps " << detail::hex_double(params.bandwidth_norm_cap_bps) << "\n";
    const auto dump = [&](const char* name, const Mlp& net) {
        out << name << " " << net.params().size() << "\n";
        for (double v : net.params()) out << detail::hex_double(v) << "\n";
    };
    dump("actor", params.actor);
    dump("critic", params.critic);
    out << "end\n";
    require(out.good(), ErrorCategory::Io, "write failed: " + path);
}

inline AgentParams load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCategory::Io, "cannot open checkpoint: " + path);
    std::string line;
    std::getline(in, line);
    require(line == kCheckpointMagic, ErrorCategory::Checkpoint,
            "unrecognized checkpoint header in " + path);

    int groups = 0;
    std::vector<int> hidden;
    std::map<std::string, double> fields;
    std::map<std::string, int> int_fields;
    std::vector<double> actor_values;
    std::vector<double> critic_values;

    while (std::getline(in, line)) {
        if (line == "end") break;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "groups") {
            ls >> groups;
        } else if (key == "hidden") {
            int h;
            while (ls >> h) hidden.push_back(h);
        } else if (key == "std_decay_start_round" || key == "update_every_rounds") {
            int v;
            ls >> v;
            int_fields[key] = v;
        } else if (key == "actor" || key == "critic") {
            std::size_t count = 0;
            ls >> count;
            auto& dest = (key == "actor") ? actor_values : critic_values;
            dest.reserve(count);
            for (std::size_t i = 0; i < count; ++i) {
                std::string token;
                require(static_cast<bool>(std::getline(in, token)), ErrorCategory::Checkpoint,
                        "truncated " + key + " block in " + path);
                dest.push_back(detail::parse_double(token, key));
            }
        } else {
            std::string token;
            ls >> token;
            fields[key] = detail::parse_double(token, key);
        }
    }
    require(groups >= 1, ErrorCategory::Checkpoint, "checkpoint missing group count");
    require(!hidden.empty(), ErrorCategory::Checkpoint, "checkpoint missing hidden sizes");

    AgentConfig config;
    config.groups = groups;
    config.hidden = hidden;
    AgentParams params = make_agent(config, 0);
    const auto field = [&](const char* key) {
        const auto it = fields.find(key);
        require(it != fields.end(), ErrorCategory::Checkpoint,
                std::string("checkpoint missing field: ") + key);
        return it->second;
    };
    params.action_std = field("action_std");
    params.action_std_initial = field("action_std_initial");
    params.std_decay_rate = field("std_decay_rate");
    params.std_floor = field("std_floor");
    params.gamma = field("gamma");
    params.clip_epsilon = field("clip_epsilon");
    params.actor_lr = field("actor_lr");
    params.critic_lr = field("critic_lr");
    params.bandwidth_norm_cap_bps = field("bandwidth_norm_cap_bps");
    params.std_decay_start_round = int_fields.at("std_decay_start_round");
    params.update_every_rounds = int_fields.at("update_every_rounds");
    require(actor_values.size() == params.actor.params().size(), ErrorCategory::Checkpoint,
            "actor parameter count mismatch in " + path);
    require(critic_values.size() == params.critic.params().size(), ErrorCategory::Checkpoint,
            "critic parameter count mismatch in " + path);
    params.actor.params() = actor_values;
    params.critic.params() = critic_values;
    return params;
}

}  // namespace fedadapt
