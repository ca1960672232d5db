#include "uavnav/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace uavnav {

void NoiseSpec::validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(mu) || !std::isfinite(sigma)) {
        throw std::invalid_argument("noise spec requires finite mu and sigma >= 0");
    }
}

NoiseSpec compose(const NoiseSpec& sensor, const NoiseSpec& injected) {
    sensor.validate();
    injected.validate();
    return {sensor.mu + injected.mu, std::hypot(sensor.sigma, injected.sigma)};
}

Vec2 perturb_position(const Vec2& true_pos, const NoiseSpec& spec, RngStream& stream) {
    const double eta_x = spec.mu + spec.sigma * stream.normal();
    const double eta_y = spec.mu + spec.sigma * stream.normal();
    return {true_pos.x + eta_x, true_pos.y + eta_y};
}

Observation perturb_observation(const SimState& state, const NoiseSpec& spec,
                                const EnvConfig& config, RngStream& stream) {
    return observe_from(perturb_position(state.pos, spec, stream), state, config);
}

}  // namespace uavnav
