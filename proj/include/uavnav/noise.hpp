#pragma once

#include "uavnav/env.hpp"
#include "uavnav/geometry.hpp"
#include "uavnav/rng.hpp"

namespace uavnav {

// Gaussian measurement-noise law. Noise enters only the observation path;
// rewards and termination always use the true state. The owning caller holds
// the RNG stream so that parallel episodes fork independent streams.
struct NoiseSpec {
    double mu = 0.0;     // meters
    double sigma = 0.0;  // meters, >= 0 (0 degenerates to a constant offset)

    void validate() const;
    bool is_zero() const { return mu == 0.0 && sigma == 0.0; }
};

// Sum of two independent Gaussian laws: means add, variances add. Used to
// inject artificial unbiased noise on top of sensor bias.
NoiseSpec compose(const NoiseSpec& sensor, const NoiseSpec& injected);

// Per-axis independent draws from N(mu, sigma); exactly two stream draws per
// call, so sequences are reproducible by call order alone.
Vec2 perturb_position(const Vec2& true_pos, const NoiseSpec& spec, RngStream& stream);

// Recomputes the observation from the perturbed self-position: goal offsets
// and nearest-hazard selection both use the noisy position.
Observation perturb_observation(const SimState& state, const NoiseSpec& spec,
                                const EnvConfig& config, RngStream& stream);

}  // namespace uavnav
