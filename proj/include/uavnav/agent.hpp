#pragma once

#include <array>

#include "uavnav/env.hpp"
#include "uavnav/nn.hpp"

namespace uavnav {

inline constexpr int kObsDim = 4;
inline constexpr int kActionDim = 3;

// Actor (4-64-64-3, tanh head) + state-independent log-std + critic
// (4-64-64-1, identity head).
struct ActorCritic {
    MlpF actor;
    std::array<float, kActionDim> log_std{};
    MlpF critic;

    static ActorCritic create(RngStream& init_stream) {
        ActorCritic ac;
        ac.actor = MlpF::create({kObsDim, 64, 64, kActionDim}, HeadActivation::tanh_head,
                                &init_stream, 0.01);
        ac.critic = MlpF::create({kObsDim, 64, 64, 1}, HeadActivation::identity, &init_stream, 1.0);
        ac.log_std.fill(0.0f);
        return ac;
    }

    std::array<float, kObsDim> obs_input(const Observation& obs) const {
        const auto a = obs.as_array();
        return {static_cast<float>(a[0]), static_cast<float>(a[1]), static_cast<float>(a[2]),
                static_cast<float>(a[3])};
    }

    std::array<float, kActionDim> action_mean(const Observation& obs) const {
        const auto in = obs_input(obs);
        const auto out = actor.forward(std::span<const float>(in));
        return {out[0], out[1], out[2]};
    }

    float value(const Observation& obs) const {
        const auto in = obs_input(obs);
        return critic.forward(std::span<const float>(in))[0];
    }
};

inline Action to_action(const std::array<float, kActionDim>& a) {
    return Action{a[0], a[1], a[2]};
}

}  // namespace uavnav
