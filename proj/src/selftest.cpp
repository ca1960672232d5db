#include "uavnav/selftest.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "uavnav/agent.hpp"
#include "uavnav/env.hpp"
#include "uavnav/eval.hpp"
#include "uavnav/filters.hpp"
#include "uavnav/nn.hpp"
#include "uavnav/noise.hpp"
#include "uavnav/ppo.hpp"

namespace uavnav {

namespace {

bool check(bool ok, const char* name) {
    std::printf("[%s] %s\n", ok ? " ok " : "FAIL", name);
    return ok;
}

bool rng_moments() {
    RngStream s(derive_seed(42, "noise"));
    double sum = 0.0, sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        sum += z;
        sq += z * z;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    return std::abs(mean) < 0.02 && std::abs(std::sqrt(var) - 1.0) < 0.02;
}

bool env_reset_geometry() {
    EnvConfig cfg;
    cfg.obstacle_count_min = cfg.obstacle_count_max = 0;
    RngStream s(7);
    const SimState state = reset_env(cfg, s);
    const Observation obs = observe(state, cfg);
    const double expected_dx = (cfg.x_max - cfg.x_min) - 2.0 * cfg.r_minor;
    return std::abs(obs.dx_goal - expected_dx) < 1e-12;
}

bool env_determinism() {
    EnvConfig cfg;
    RngStream a(99), b(99);
    const SimState sa = reset_env(cfg, a);
    const SimState sb = reset_env(cfg, b);
    if (!(sa.pos == sb.pos) || sa.obstacles.size() != sb.obstacles.size()) return false;
    for (std::size_t i = 0; i < sa.obstacles.size(); ++i) {
        if (!(sa.obstacles[i].center == sb.obstacles[i].center)) return false;
    }
    return true;
}

bool lpf_design_checks() {
    const BiquadCoeffs c = bessel2_lowpass(2.0, 20.0);
    if (std::abs(c.dc_gain() - 1.0) > 1e-9) return false;

    // Poles of the discretized filter must be the bilinear image of the
    // analog prototype poles.
    const double wc = 2.0, fs = 20.0;
    const double k = wc / std::tan(0.5 * wc / fs);
    const std::complex<double> proto1 = wc * std::complex<double>(-1.5, std::sqrt(3.0) / 2.0);
    const std::complex<double> proto2 = std::conj(proto1);
    const std::complex<double> z1 = (k + proto1) / (k - proto1);
    const std::complex<double> z2 = (k + proto2) / (k - proto2);
    // Roots of z^2 + a1 z + a2.
    const std::complex<double> disc = std::sqrt(std::complex<double>(c.a1 * c.a1 - 4.0 * c.a2));
    const std::complex<double> r1 = (-c.a1 + disc) * 0.5;
    const std::complex<double> r2 = (-c.a1 - disc) * 0.5;
    const double err = std::min(std::abs(r1 - z1) + std::abs(r2 - z2),
                                std::abs(r1 - z2) + std::abs(r2 - z1));
    return err < 1e-9 && std::abs(z1) < 1.0 && std::abs(z2) < 1.0;
}

bool kalman_spd() {
    KalmanState st = make_kalman(0.05, 0.25);
    RngStream s(5);
    for (int i = 0; i < 10000; ++i) {
        kalman_step(st, {s.normal(0.0, 1.0), s.normal(0.0, 1.0)},
                    {s.uniform(-0.5, 0.5), s.uniform(-0.5, 0.5)}, 0.05);
        // Cholesky succeeds iff positive-definite.
        const auto& p = st.cov;
        double l[16] = {0};
        for (int r = 0; r < 4; ++r) {
            for (int c2 = 0; c2 <= r; ++c2) {
                double sum = p[r * 4 + c2];
                for (int j = 0; j < c2; ++j) sum -= l[r * 4 + j] * l[c2 * 4 + j];
                if (r == c2) {
                    if (sum <= 0.0) return false;
                    l[r * 4 + c2] = std::sqrt(sum);
                } else {
                    l[r * 4 + c2] = sum / l[c2 * 4 + c2];
                }
            }
        }
        for (int r = 0; r < 4; ++r)
            for (int c2 = 0; c2 < 4; ++c2)
                if (std::abs(p[r * 4 + c2] - p[c2 * 4 + r]) > 1e-9) return false;
    }
    return true;
}

bool gradient_check() {
    RngStream s(31);
    MlpD net = MlpD::create({4, 8, 3}, HeadActivation::tanh_head, &s, 0.5);
    const std::vector<double> input = {0.3, -1.2, 2.0, 0.7};
    const std::vector<double> target = {0.1, -0.2, 0.4};

    MlpD::Cache cache;
    const auto out = net.forward(input, &cache);
    std::vector<double> dout(3);
    for (int i = 0; i < 3; ++i) dout[i] = out[i] - target[i];
    const auto grads = net.backward(cache, dout);

    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t idx = s.next_u64() % net.params.size();
        const double h = 1e-6;
        const double orig = net.params[idx];
        auto loss = [&]() {
            const auto y = net.forward(input);
            double l = 0.0;
            for (int i = 0; i < 3; ++i) l += 0.5 * (y[i] - target[i]) * (y[i] - target[i]);
            return l;
        };
        net.params[idx] = orig + h;
        const double lp = loss();
        net.params[idx] = orig - h;
        const double lm = loss();
        net.params[idx] = orig;
        const double fd = (lp - lm) / (2 * h);
        const double denom = std::max({std::abs(fd), std::abs(grads[idx]), 1e-8});
        if (std::abs(fd - grads[idx]) / denom > 1e-4) return false;
    }
    return true;
}

bool gae_oracle() {
    RngStream s(77);
    const double gamma = 0.99, lambda = 0.95;
    for (int trial = 0; trial < 10; ++trial) {
        RolloutBuffer buf;
        buf.rollout_length = 10;
        buf.n_envs = 1;
        buf.data.resize(10);
        for (auto& tr : buf.data) {
            tr.reward = static_cast<float>(s.uniform(-2.0, 2.0));
            tr.value_old = static_cast<float>(s.uniform(-1.0, 1.0));
            tr.done = s.uniform() < 0.2 ? 1 : 0;
        }
        const float last_value = static_cast<float>(s.uniform(-1.0, 1.0));
        const std::vector<float> lv = {last_value};
        compute_gae(buf, lv, gamma, lambda);

        // Brute-force double loop.
        for (int t = 0; t < 10; ++t) {
            double adv = 0.0, disc = 1.0;
            for (int k = t; k < 10; ++k) {
                const double next_v = (k + 1 < 10) ? buf.data[k + 1].value_old : last_value;
                const double not_done = buf.data[k].done ? 0.0 : 1.0;
                const double delta =
                    buf.data[k].reward + gamma * next_v * not_done - buf.data[k].value_old;
                adv += disc * delta;
                if (buf.data[k].done) break;
                disc *= gamma * lambda;
            }
            if (std::abs(adv - buf.advantages[t]) > 1e-10 + 1e-6 * std::abs(adv)) return false;
        }
    }
    return true;
}

bool noise_identity() {
    const NoiseSpec zero{0.0, 0.0};
    const NoiseSpec bias{0.15, 0.0};
    RngStream s(3);
    const Vec2 p{1.0, 2.0};
    const Vec2 same = perturb_position(p, zero, s);
    const Vec2 shifted = perturb_position(p, bias, s);
    return same == p && shifted == Vec2{1.15, 2.15};
}

bool ratio_identity() {
    RngStream init(11);
    ActorCritic agent = ActorCritic::create(init);
    RngStream policy(12);

    RolloutBuffer buf;
    buf.rollout_length = 8;
    buf.n_envs = 1;
    buf.data.resize(8);
    RngStream obs_stream(13);
    for (auto& tr : buf.data) {
        for (auto& o : tr.obs) o = static_cast<float>(obs_stream.uniform(-2.0, 2.0));
        const auto mean = agent.actor.forward(std::span<const float>(tr.obs.data(), kObsDim));
        const auto sample =
            gaussian_sample(std::span<const float>(mean.data(), kActionDim),
                            std::span<const float>(agent.log_std.data(), kActionDim), policy);
        tr.action = {sample[0], sample[1], sample[2]};
        tr.logp_old = static_cast<float>(gaussian_log_prob(
            std::span<const float>(mean.data(), kActionDim),
            std::span<const float>(agent.log_std.data(), kActionDim),
            std::span<const float>(sample.data(), kActionDim)));
    }
    for (const auto& tr : buf.data) {
        const auto mean = agent.actor.forward(std::span<const float>(tr.obs.data(), kObsDim));
        const double lp = gaussian_log_prob(
            std::span<const float>(mean.data(), kActionDim),
            std::span<const float>(agent.log_std.data(), kActionDim),
            std::span<const float>(tr.action.data(), kActionDim));
        if (std::abs(std::exp(lp - tr.logp_old) - 1.0) > 1e-6) return false;
    }
    return true;
}

}  // namespace

bool run_selftest() {
    bool ok = true;
    ok &= check(rng_moments(), "measurement noise matches its Gaussian law");
    ok &= check(noise_identity(), "zero noise is identity, pure bias is an exact offset");
    ok &= check(env_reset_geometry(), "spawn/goal geometry");
    ok &= check(env_determinism(), "seeded episode generation is deterministic");
    ok &= check(lpf_design_checks(), "low-pass design: unity DC gain, bilinear pole map");
    ok &= check(kalman_spd(), "kalman covariance stays symmetric positive-definite");
    ok &= check(gradient_check(), "backprop matches central finite differences");
    ok &= check(gae_oracle(), "advantage recursion matches brute-force evaluation");
    ok &= check(ratio_identity(), "policy ratios are 1 before any update");
    return ok;
}

}  // namespace uavnav
