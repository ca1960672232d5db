#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "uavnav/agent.hpp"
#include "uavnav/env.hpp"
#include "uavnav/filters.hpp"
#include "uavnav/noise.hpp"

namespace uavnav {

struct PpoConfig {
    long total_timesteps = 500000;
    int rollout_length = 2048;
    int minibatch_size = 64;
    int epochs_per_update = 10;
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double clip_eps = 0.2;
    double value_coeff = 0.5;
    double entropy_coeff = 0.0;
    double max_grad_norm = 0.5;
    int n_envs = 1;

    void validate() const;  // throws std::invalid_argument
};

struct Transition {
    std::array<float, kObsDim> obs;  // what the policy saw (denoised path)
    std::array<float, kActionDim> action;  // raw sample, pre-clamp
    float logp_old = 0.0f;
    float value_old = 0.0f;
    float reward = 0.0f;
    uint8_t done = 0;
};

// Env-major storage: index = env * rollout_length + t, so merged buffers are
// deterministic in env-index order.
struct RolloutBuffer {
    int rollout_length = 0;
    int n_envs = 0;
    std::vector<Transition> data;
    std::vector<double> advantages;  // double so the estimator is exact to 1e-10
    std::vector<double> returns;

    int size() const { return rollout_length * n_envs; }
    Transition& at(int env, int t) { return data[env * rollout_length + t]; }
    const Transition& at(int env, int t) const { return data[env * rollout_length + t]; }
};

// Steps one environment instance through the noisy-observation pipeline:
// perturb the true position, denoise it, and recompute the observation from
// the estimate. Rewards and termination always come from the true state.
class ObsPipeline {
   public:
    ObsPipeline(const EnvConfig& env_config, const NoiseSpec& noise, DenoiserKind denoiser_kind,
                const FilterConfig& filter_config, uint64_t env_seed, uint64_t noise_seed);

    void reset_episode();
    // Applies the action; refreshes the pending observation (terminal steps
    // auto-reset into a fresh episode first).
    StepOutcome advance(const Action& action);

    const Observation& pending_observation() const { return pending_obs_; }
    const SimState& state() const { return state_; }
    const EnvConfig& env_config() const { return env_config_; }

    // Undiscounted return / length / outcome of the episode finished by the
    // last advance(), valid only when that step was terminal.
    double finished_return() const { return finished_return_; }
    int finished_length() const { return finished_length_; }
    DoneReason finished_reason() const { return finished_reason_; }

   private:
    void refresh_observation();

    EnvConfig env_config_;
    NoiseSpec noise_;
    Denoiser denoiser_;
    RngStream env_stream_;
    RngStream noise_stream_;
    SimState state_;
    Observation pending_obs_;
    Vec2 prev_cmd_{0.0, 0.0};
    double episode_return_ = 0.0;
    int episode_length_ = 0;
    double finished_return_ = 0.0;
    int finished_length_ = 0;
    DoneReason finished_reason_ = DoneReason::running;
};

struct EpisodeEvent {
    int env_index = 0;
    long steps_into_rollout = 0;  // transitions consumed when the episode closed
    double ep_return = 0.0;
    int ep_len = 0;
    DoneReason reason = DoneReason::running;
};

// Fills the buffer by stepping every pipeline rollout_length times in
// env-index order; the policy sees pending (denoised) observations, samples
// with `policy_stream`, and stores raw actions with their log-probs and
// values. Finished episodes are reported through `on_episode`.
void collect_rollout(const ActorCritic& agent, std::vector<ObsPipeline>& pipelines,
                     RngStream& policy_stream, RolloutBuffer& buffer,
                     const std::function<void(const EpisodeEvent&)>& on_episode = nullptr);

struct EpisodeRow {
    long step = 0;  // global env steps at completion
    long episode = 0;
    double ep_return = 0.0;
    int ep_len = 0;
    double mean100_return = 0.0;
    double mean100_len = 0.0;
    double policy_loss = 0.0;  // latest completed update, 0 before the first
    double value_loss = 0.0;
    double clip_frac = 0.0;
};

struct UpdateStats {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double clip_frac = 0.0;
    double max_ratio_dev_first_minibatch = 0.0;  // max |ratio - 1| before any step
};

struct TrainLog {
    std::vector<EpisodeRow> episodes;
    std::vector<UpdateStats> updates;

    void write_csv(const std::string& path) const;
};

// Fills advantages and returns. `last_values` holds one bootstrap value per
// environment (ignored wherever the final stored transition is terminal).
void compute_gae(RolloutBuffer& buffer, std::span<const float> last_values, double gamma,
                 double lambda);

// One PPO update over the buffer: epochs of shuffled minibatches, clipped
// surrogate + value MSE - entropy bonus, per-minibatch advantage
// normalization, global gradient-norm clipping, Adam. Throws
// std::runtime_error if a loss turns non-finite.
struct PpoUpdater;
UpdateStats ppo_update(ActorCritic& agent, RolloutBuffer& buffer, const PpoConfig& config,
                       AdamState& adam_actor, AdamState& adam_log_std, AdamState& adam_critic,
                       const AdamConfig& adam_config, RngStream& shuffle_stream);

struct TrainSettings {
    EnvConfig env;
    NoiseSpec noise;                      // training-time measurement noise
    DenoiserKind denoiser = DenoiserKind::none;
    FilterConfig filter;
    PpoConfig ppo;
    uint64_t master_seed = 1;
    std::string out_dir;                  // empty: no checkpoint/log files
    long checkpoint_every = 100000;       // steps between checkpoint rewrites
    bool verbose = false;
};

struct TrainResult {
    ActorCritic agent;
    TrainLog log;
};

TrainResult train(const TrainSettings& settings);

}  // namespace uavnav
