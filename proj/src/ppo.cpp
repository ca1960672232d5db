#include "uavnav/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <stdexcept>

#include "uavnav/checkpoint.hpp"

namespace uavnav {

void PpoConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("invalid ppo config: ") + what);
    };
    require(total_timesteps > 0, "total_timesteps > 0");
    require(rollout_length > 0, "rollout_length > 0");
    require(minibatch_size > 0, "minibatch_size > 0");
    require(rollout_length % minibatch_size == 0, "rollout_length divisible by minibatch_size");
    require(epochs_per_update > 0, "epochs_per_update > 0");
    require(gamma > 0.0 && gamma <= 1.0, "0 < gamma <= 1");
    require(gae_lambda >= 0.0 && gae_lambda <= 1.0, "0 <= gae_lambda <= 1");
    require(clip_eps > 0.0, "clip_eps > 0");
    require(value_coeff >= 0.0, "value_coeff >= 0");
    require(entropy_coeff >= 0.0, "entropy_coeff >= 0");
    require(max_grad_norm > 0.0, "max_grad_norm > 0");
    require(n_envs > 0, "n_envs > 0");
}

ObsPipeline::ObsPipeline(const EnvConfig& env_config, const NoiseSpec& noise,
                         DenoiserKind denoiser_kind, const FilterConfig& filter_config,
                         uint64_t env_seed, uint64_t noise_seed)
    : env_config_(env_config),
      noise_(noise),
      denoiser_(denoiser_kind, filter_config, noise.sigma, env_config.sample_rate_hz()),
      env_stream_(env_seed),
      noise_stream_(noise_seed) {
    env_config_.validate();
    noise_.validate();
    reset_episode();
}

void ObsPipeline::reset_episode() {
    state_ = reset_env(env_config_, env_stream_);
    denoiser_.reset();
    prev_cmd_ = {0.0, 0.0};
    episode_return_ = 0.0;
    episode_length_ = 0;
    refresh_observation();
}

void ObsPipeline::refresh_observation() {
    // One noise draw per control step; goal and hazard offsets share it.
    const Vec2 measured = perturb_position(state_.pos, noise_, noise_stream_);
    const Vec2 estimate = denoiser_.step(measured, prev_cmd_, env_config_.dt);
    pending_obs_ = observe_from(estimate, state_, env_config_);
}

StepOutcome ObsPipeline::advance(const Action& action) {
    prev_cmd_ = velocity_command(action, env_config_);
    StepOutcome out = step_env(state_, action, env_config_);
    episode_return_ += out.reward;
    episode_length_ += 1;
    if (out.terminal) {
        finished_return_ = episode_return_;
        finished_length_ = episode_length_;
        finished_reason_ = state_.done_reason;
        reset_episode();
    } else {
        refresh_observation();
    }
    return out;
}

void collect_rollout(const ActorCritic& agent, std::vector<ObsPipeline>& pipelines,
                     RngStream& policy_stream, RolloutBuffer& buffer,
                     const std::function<void(const EpisodeEvent&)>& on_episode) {
    if (buffer.n_envs != static_cast<int>(pipelines.size())) {
        throw std::invalid_argument("collect_rollout: one pipeline per env required");
    }
    if (buffer.data.size() != static_cast<std::size_t>(buffer.size())) {
        buffer.data.resize(buffer.size());
    }

    long consumed = 0;
    for (int t = 0; t < buffer.rollout_length; ++t) {
        for (int e = 0; e < buffer.n_envs; ++e) {
            ObsPipeline& pipe = pipelines[e];
            const auto obs_in = agent.obs_input(pipe.pending_observation());
            const auto mean = agent.actor.forward(std::span<const float>(obs_in));
            const auto sample = gaussian_sample(
                std::span<const float>(mean.data(), kActionDim),
                std::span<const float>(agent.log_std.data(), kActionDim), policy_stream);
            const double logp = gaussian_log_prob(
                std::span<const float>(mean.data(), kActionDim),
                std::span<const float>(agent.log_std.data(), kActionDim),
                std::span<const float>(sample.data(), kActionDim));
            const float value = agent.critic.forward(std::span<const float>(obs_in))[0];

            const StepOutcome out = pipe.advance(Action{sample[0], sample[1], sample[2]});
            ++consumed;

            Transition& tr = buffer.at(e, t);
            tr.obs = obs_in;
            tr.action = {sample[0], sample[1], sample[2]};
            tr.logp_old = static_cast<float>(logp);
            tr.value_old = value;
            tr.reward = static_cast<float>(out.reward);
            tr.done = out.terminal ? 1 : 0;

            if (out.terminal && on_episode) {
                on_episode({e, consumed, pipe.finished_return(), pipe.finished_length(),
                            pipe.finished_reason()});
            }
        }
    }
}

void TrainLog::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write train log: " + path);
    out << "step,episode,ep_return,ep_len,mean100_return,mean100_len,policy_loss,value_loss,"
           "clip_frac\n";
    char buf[256];
    for (const EpisodeRow& r : episodes) {
        std::snprintf(buf, sizeof(buf), "%ld,%ld,%.9g,%d,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.step,
                      r.episode, r.ep_return, r.ep_len, r.mean100_return, r.mean100_len,
                      r.policy_loss, r.value_loss, r.clip_frac);
        out << buf;
    }
}

void compute_gae(RolloutBuffer& buffer, std::span<const float> last_values, double gamma,
                 double lambda) {
    if (static_cast<int>(last_values.size()) != buffer.n_envs) {
        throw std::invalid_argument("compute_gae: one bootstrap value per env required");
    }
    const int n = buffer.size();
    buffer.advantages.assign(n, 0.0);
    buffer.returns.assign(n, 0.0);

    for (int e = 0; e < buffer.n_envs; ++e) {
        double next_adv = 0.0;
        double next_value = last_values[e];
        for (int t = buffer.rollout_length - 1; t >= 0; --t) {
            const Transition& tr = buffer.at(e, t);
            const double not_done = tr.done ? 0.0 : 1.0;
            const double delta =
                tr.reward + gamma * next_value * not_done - static_cast<double>(tr.value_old);
            next_adv = delta + gamma * lambda * not_done * next_adv;
            const int idx = e * buffer.rollout_length + t;
            buffer.advantages[idx] = next_adv;
            buffer.returns[idx] = next_adv + tr.value_old;
            next_value = tr.value_old;
        }
    }
}

namespace {

double global_grad_norm(const std::vector<double>& a, const std::vector<double>& b,
                        const std::vector<double>& c) {
    double sq = 0.0;
    for (double v : a) sq += v * v;
    for (double v : b) sq += v * v;
    for (double v : c) sq += v * v;
    return std::sqrt(sq);
}

void scale_all(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c, double s) {
    for (double& v : a) v *= s;
    for (double& v : b) v *= s;
    for (double& v : c) v *= s;
}

std::vector<float> to_float(const std::vector<double>& v) {
    std::vector<float> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
    return out;
}

}  // namespace

UpdateStats ppo_update(ActorCritic& agent, RolloutBuffer& buffer, const PpoConfig& config,
                       AdamState& adam_actor, AdamState& adam_log_std, AdamState& adam_critic,
                       const AdamConfig& adam_config, RngStream& shuffle_stream) {
    const int n = buffer.size();
    if (n == 0 || buffer.advantages.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("ppo_update: buffer advantages not computed");
    }
    if (n % config.minibatch_size != 0) {
        throw std::invalid_argument("ppo_update: buffer size not divisible by minibatch size");
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    UpdateStats stats;
    double policy_loss_sum = 0.0, value_loss_sum = 0.0, entropy_sum = 0.0;
    long clip_count = 0;
    long sample_count = 0;
    int minibatch_count = 0;
    bool first_minibatch = true;

    const float* log_std = agent.log_std.data();

    for (int epoch = 0; epoch < config.epochs_per_update; ++epoch) {
        // Fisher-Yates with the dedicated shuffle stream.
        for (int i = n - 1; i > 0; --i) {
            const int j = shuffle_stream.uniform_int(0, i);
            std::swap(order[i], order[j]);
        }

        for (int start = 0; start < n; start += config.minibatch_size) {
            const int m = config.minibatch_size;

            // Per-minibatch advantage normalization.
            double adv_mean = 0.0;
            for (int i = 0; i < m; ++i) adv_mean += buffer.advantages[order[start + i]];
            adv_mean /= m;
            double adv_var = 0.0;
            for (int i = 0; i < m; ++i) {
                const double d = buffer.advantages[order[start + i]] - adv_mean;
                adv_var += d * d;
            }
            const double adv_std = std::sqrt(adv_var / m) + 1e-8;

            std::vector<double> g_actor(agent.actor.params.size(), 0.0);
            std::vector<double> g_log_std(kActionDim, 0.0);
            std::vector<double> g_critic(agent.critic.params.size(), 0.0);

            double mb_policy_loss = 0.0, mb_value_loss = 0.0;
            double max_ratio_dev = 0.0;

            for (int i = 0; i < m; ++i) {
                const Transition& tr = buffer.data[order[start + i]];
                const double adv = (buffer.advantages[order[start + i]] - adv_mean) / adv_std;
                const double ret = buffer.returns[order[start + i]];

                MlpF::Cache actor_cache;
                const auto mean = agent.actor.forward(
                    std::span<const float>(tr.obs.data(), kObsDim), &actor_cache);
                const double logp_new = gaussian_log_prob(
                    std::span<const float>(mean.data(), kActionDim),
                    std::span<const float>(log_std, kActionDim),
                    std::span<const float>(tr.action.data(), kActionDim));
                const double ratio = std::exp(logp_new - static_cast<double>(tr.logp_old));
                max_ratio_dev = std::max(max_ratio_dev, std::abs(ratio - 1.0));
                if (std::abs(ratio - 1.0) > config.clip_eps) ++clip_count;
                ++sample_count;

                const double unclipped = ratio * adv;
                const double clipped =
                    clamp(ratio, 1.0 - config.clip_eps, 1.0 + config.clip_eps) * adv;
                mb_policy_loss += -std::min(unclipped, clipped);

                // Gradient flows only while the unclipped branch is active.
                double dloss_dlogp = 0.0;
                if (unclipped <= clipped) dloss_dlogp = -ratio * adv / m;

                if (dloss_dlogp != 0.0) {
                    std::array<float, kActionDim> dmean;
                    for (int k = 0; k < kActionDim; ++k) {
                        const double sigma = std::exp(static_cast<double>(log_std[k]));
                        const double z =
                            (static_cast<double>(tr.action[k]) - mean[k]) / sigma;
                        // d logp / d mean_k and d logp / d log_std_k.
                        dmean[k] = static_cast<float>(dloss_dlogp * (z / sigma));
                        g_log_std[k] += dloss_dlogp * (z * z - 1.0);
                    }
                    const auto ga = agent.actor.backward(
                        actor_cache, std::span<const float>(dmean.data(), kActionDim));
                    for (std::size_t k = 0; k < ga.size(); ++k) g_actor[k] += ga[k];
                }

                MlpF::Cache critic_cache;
                const auto value = agent.critic.forward(
                    std::span<const float>(tr.obs.data(), kObsDim), &critic_cache);
                const double verr = static_cast<double>(value[0]) - ret;
                mb_value_loss += verr * verr;
                const std::array<float, 1> dvalue = {
                    static_cast<float>(config.value_coeff * 2.0 * verr / m)};
                const auto gc = agent.critic.backward(
                    critic_cache, std::span<const float>(dvalue.data(), 1));
                for (std::size_t k = 0; k < gc.size(); ++k) g_critic[k] += gc[k];
            }

            mb_policy_loss /= m;
            mb_value_loss /= m;
            const double mb_entropy =
                gaussian_entropy(std::span<const float>(log_std, kActionDim));
            for (int k = 0; k < kActionDim; ++k) g_log_std[k] -= config.entropy_coeff;

            const double total_loss = mb_policy_loss + config.value_coeff * mb_value_loss -
                                      config.entropy_coeff * mb_entropy;
            if (!std::isfinite(total_loss)) {
                char msg[160];
                std::snprintf(msg, sizeof(msg),
                              "ppo_update: non-finite loss (policy=%g value=%g entropy=%g)",
                              mb_policy_loss, mb_value_loss, mb_entropy);
                throw std::runtime_error(msg);
            }

            if (first_minibatch) {
                stats.max_ratio_dev_first_minibatch = max_ratio_dev;
                first_minibatch = false;
            }

            const double norm = global_grad_norm(g_actor, g_log_std, g_critic);
            if (norm > config.max_grad_norm) {
                scale_all(g_actor, g_log_std, g_critic, config.max_grad_norm / norm);
            }

            auto gaf = to_float(g_actor);
            auto glf = to_float(g_log_std);
            auto gcf = to_float(g_critic);
            adam_step<float>(agent.actor.params, gaf, adam_actor, adam_config);
            adam_step<float>(agent.log_std, glf, adam_log_std, adam_config);
            adam_step<float>(agent.critic.params, gcf, adam_critic, adam_config);

            policy_loss_sum += mb_policy_loss;
            value_loss_sum += mb_value_loss;
            entropy_sum += mb_entropy;
            ++minibatch_count;
        }
    }

    stats.policy_loss = policy_loss_sum / minibatch_count;
    stats.value_loss = value_loss_sum / minibatch_count;
    stats.entropy = entropy_sum / minibatch_count;
    stats.clip_frac = static_cast<double>(clip_count) / static_cast<double>(sample_count);
    return stats;
}

TrainResult train(const TrainSettings& settings) {
    settings.env.validate();
    settings.noise.validate();
    settings.ppo.validate();

    const uint64_t master = settings.master_seed;
    RngStream init_stream(derive_seed(master, "init"));
    RngStream policy_stream(derive_seed(master, "policy"));
    RngStream shuffle_stream(derive_seed(master, "shuffle"));

    TrainResult result{ActorCritic::create(init_stream), {}};
    ActorCritic& agent = result.agent;
    TrainLog& log = result.log;

    AdamState adam_actor(agent.actor.params.size());
    AdamState adam_log_std(kActionDim);
    AdamState adam_critic(agent.critic.params.size());
    AdamConfig adam_config;

    const PpoConfig& pc = settings.ppo;
    std::vector<ObsPipeline> pipelines;
    pipelines.reserve(pc.n_envs);
    for (int e = 0; e < pc.n_envs; ++e) {
        pipelines.emplace_back(settings.env, settings.noise, settings.denoiser, settings.filter,
                               derive_seed(master, "env", e), derive_seed(master, "noise", e));
    }

    RolloutBuffer buffer;
    buffer.rollout_length = pc.rollout_length;
    buffer.n_envs = pc.n_envs;
    buffer.data.resize(buffer.size());

    std::deque<double> window_return;
    std::deque<int> window_len;
    auto window_mean = [](const auto& w) {
        double s = 0.0;
        for (const auto v : w) s += static_cast<double>(v);
        return w.empty() ? 0.0 : s / static_cast<double>(w.size());
    };

    long steps = 0;
    long episode_count = 0;
    UpdateStats last_update{};
    bool have_update = false;

    const bool save_files = !settings.out_dir.empty();
    if (save_files) std::filesystem::create_directories(settings.out_dir);
    long next_checkpoint = settings.checkpoint_every;

    while (steps < pc.total_timesteps) {
        collect_rollout(agent, pipelines, policy_stream, buffer,
                        [&](const EpisodeEvent& ev) {
                            ++episode_count;
                            window_return.push_back(ev.ep_return);
                            window_len.push_back(ev.ep_len);
                            if (window_return.size() > 100) {
                                window_return.pop_front();
                                window_len.pop_front();
                            }
                            EpisodeRow row;
                            row.step = steps + ev.steps_into_rollout;
                            row.episode = episode_count;
                            row.ep_return = ev.ep_return;
                            row.ep_len = ev.ep_len;
                            row.mean100_return = window_mean(window_return);
                            row.mean100_len = window_mean(window_len);
                            if (have_update) {
                                row.policy_loss = last_update.policy_loss;
                                row.value_loss = last_update.value_loss;
                                row.clip_frac = last_update.clip_frac;
                            }
                            log.episodes.push_back(row);
                        });
        steps += static_cast<long>(pc.rollout_length) * pc.n_envs;

        std::vector<float> last_values(pc.n_envs);
        for (int e = 0; e < pc.n_envs; ++e) {
            last_values[e] = agent.value(pipelines[e].pending_observation());
        }
        compute_gae(buffer, last_values, pc.gamma, pc.gae_lambda);
        last_update = ppo_update(agent, buffer, pc, adam_actor, adam_log_std, adam_critic,
                                 adam_config, shuffle_stream);
        have_update = true;
        log.updates.push_back(last_update);

        if (settings.verbose) {
            std::printf("steps %ld  episodes %ld  mean100_return %.1f  mean100_len %.1f  "
                        "policy_loss %.4f  value_loss %.1f  clip %.3f\n",
                        steps, episode_count, window_mean(window_return), window_mean(window_len),
                        last_update.policy_loss, last_update.value_loss, last_update.clip_frac);
            std::fflush(stdout);
        }

        if (save_files && steps >= next_checkpoint) {
            save_checkpoint(settings.out_dir + "/checkpoint_latest.ckpt", agent);
            log.write_csv(settings.out_dir + "/trainlog.csv");
            next_checkpoint += settings.checkpoint_every;
        }
    }

    if (save_files) {
        save_checkpoint(settings.out_dir + "/checkpoint.ckpt", agent);
        log.write_csv(settings.out_dir + "/trainlog.csv");
    }
    return result;
}

}  // namespace uavnav
