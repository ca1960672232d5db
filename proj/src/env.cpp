#include "uavnav/env.hpp"

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace uavnav {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
}

// Closest point on the axis-aligned segment from a to b (one coordinate equal).
Vec2 closest_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    if (a.x == b.x) return {a.x, clamp(p.y, std::min(a.y, b.y), std::max(a.y, b.y))};
    return {clamp(p.x, std::min(a.x, b.x), std::max(a.x, b.x)), a.y};
}

double min_obstacle_surface_distance(const Vec2& p, const SimState& state) {
    double best = std::numeric_limits<double>::infinity();
    for (const Obstacle& o : state.obstacles) {
        best = std::min(best, (p - o.center).norm() - o.radius);
    }
    return best;
}

}  // namespace

void RewardParams::validate() const {
    require(r_success > 0.0, "r_success must be > 0");
    require(r_fail < 0.0, "r_fail must be < 0");
    require(r_dist_coeff > 0.0, "r_dist_coeff must be > 0");
    require(r_major_penalty > 0.0, "r_major_penalty must be > 0");
    require(r_minor_penalty > 0.0, "r_minor_penalty must be > 0");
}

void EnvConfig::validate() const {
    require(x_min < x_max, "x_min < x_max");
    require(y_min < y_max, "y_min < y_max");
    require(z_min < z_max, "z_min < z_max");
    require(r_major > 0.0 && r_major < r_minor, "0 < r_major < r_minor");
    require(obstacle_count_min >= 0, "obstacle_count_min >= 0");
    require(obstacle_count_max >= obstacle_count_min, "obstacle_count_min <= obstacle_count_max");
    require(obstacle_radius > 0.0, "obstacle_radius > 0");
    require(obstacle_y_sigma >= 0.0, "obstacle_y_sigma >= 0");
    require(eps_success > 0.0, "eps_success > 0");
    require(eps_safe > 0.0, "eps_safe > 0");
    require(v_max > 0.0, "v_max > 0");
    require(dt > 0.0, "dt > 0");
    require(max_steps > 0, "max_steps > 0");
    // Spawn and goal columns must fit inside the arena.
    require(x_min + r_minor < x_max - r_minor, "arena too narrow for r_minor insets");
    require(y_min + r_minor < y_max - r_minor, "arena too short for r_minor insets");
    reward.validate();
}

const char* to_string(DoneReason r) {
    switch (r) {
        case DoneReason::running: return "running";
        case DoneReason::success: return "success";
        case DoneReason::collision: return "collision";
        case DoneReason::timeout: return "timeout";
    }
    return "?";
}

HazardInfo nearest_hazard(const Vec2& p, const SimState& state, const EnvConfig& config) {
    HazardInfo best;
    best.distance = std::numeric_limits<double>::infinity();

    int index = 0;
    for (const Obstacle& o : state.obstacles) {
        const Vec2 to_p = p - o.center;
        const double d = to_p.norm() - o.radius;
        if (d < best.distance) {
            Vec2 dir = to_p.unit_or_zero();
            if (dir.x == 0.0 && dir.y == 0.0) dir = {1.0, 0.0};  // point at the center
            best = {d, o.center + dir * o.radius, index};
        }
        ++index;
    }

    // Walls in fixed order: left, right, bottom, top.
    const Vec2 bl{config.x_min, config.y_min};
    const Vec2 br{config.x_max, config.y_min};
    const Vec2 tl{config.x_min, config.y_max};
    const Vec2 tr{config.x_max, config.y_max};
    const std::array<std::pair<Vec2, Vec2>, 4> walls = {
        std::pair{bl, tl}, std::pair{br, tr}, std::pair{bl, br}, std::pair{tl, tr}};
    for (const auto& [a, b] : walls) {
        const Vec2 q = closest_on_segment(p, a, b);
        const double d = (p - q).norm();
        if (d < best.distance) best = {d, q, index};
        ++index;
    }
    return best;
}

SimState reset_env(const EnvConfig& config, RngStream& env_stream) {
    config.validate();

    SimState state;
    state.pos = {config.x_min + config.r_minor,
                 env_stream.uniform(config.y_min + config.r_minor, config.y_max - config.r_minor)};
    state.goal = {config.x_max - config.r_minor, 0.5 * (config.y_min + config.y_max)};

    const int count = env_stream.uniform_int(config.obstacle_count_min, config.obstacle_count_max);
    const double clearance = config.r_minor + config.obstacle_radius;
    const double y_lo = config.y_min + config.obstacle_radius;
    const double y_hi = config.y_max - config.obstacle_radius;
    const double centerline = 0.5 * (config.y_min + config.y_max);

    state.obstacles.reserve(count);
    for (int i = 0; i < count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
            Obstacle o;
            o.center.x = env_stream.uniform(state.pos.x, state.goal.x);
            o.center.y = clamp(env_stream.normal(centerline, config.obstacle_y_sigma), y_lo, y_hi);
            o.radius = config.obstacle_radius;
            if ((o.center - state.pos).norm() <= clearance) continue;
            if ((o.center - state.goal).norm() <= clearance) continue;
            state.obstacles.push_back(o);
            placed = true;
        }
        if (!placed) {
            throw std::runtime_error(
                "obstacle placement failed after 100 attempts; arena too dense for config");
        }
    }
    return state;
}

Observation observe_from(const Vec2& p, const SimState& state, const EnvConfig& config) {
    const HazardInfo hz = nearest_hazard(p, state, config);
    Observation obs;
    obs.dx_goal = state.goal.x - p.x;
    obs.dy_goal = state.goal.y - p.y;
    obs.dx_obs = hz.surface_point.x - p.x;
    obs.dy_obs = hz.surface_point.y - p.y;
    return obs;
}

Observation observe(const SimState& state, const EnvConfig& config) {
    return observe_from(state.pos, state, config);
}

Vec2 velocity_command(const Action& action, const EnvConfig& config) {
    const Vec2 dir = Vec2{clamp(action.vx_raw, -1.0, 1.0), clamp(action.vy_raw, -1.0, 1.0)}.unit_or_zero();
    const double speed = 0.5 * (clamp(action.vmag_raw, -1.0, 1.0) + 1.0) * config.v_max;
    return dir * speed;
}

double transition_reward(const SimState& next, bool breach_major, bool breach_minor,
                         const EnvConfig& config) {
    const RewardParams& rp = config.reward;
    switch (next.done_reason) {
        case DoneReason::success: return rp.r_success;
        case DoneReason::collision: return rp.r_fail;
        case DoneReason::timeout: return rp.r_fail;
        case DoneReason::running: break;
    }
    const double d_goal = (next.goal - next.pos).norm();
    return -rp.r_dist_coeff * d_goal - (breach_major ? rp.r_major_penalty : 0.0) -
           (breach_minor ? rp.r_minor_penalty : 0.0);
}

StepOutcome step_env(SimState& state, const Action& action, const EnvConfig& config) {
    if (state.done_reason != DoneReason::running) {
        throw std::logic_error("step_env called on a finished episode");
    }

    const Vec2 cmd = velocity_command(action, config);
    state.pos += cmd * config.dt;
    state.pos.x = clamp(state.pos.x, config.x_min, config.x_max);
    state.pos.y = clamp(state.pos.y, config.y_min, config.y_max);
    state.step += 1;

    const double d_goal = (state.goal - state.pos).norm();
    const HazardInfo hz = nearest_hazard(state.pos, state, config);
    const double d_obstacle = min_obstacle_surface_distance(state.pos, state);

    // Terminal checks in priority order. Wall contact is never a collision;
    // the geofence only penalizes through the breach flags.
    if (d_goal < config.eps_success) {
        state.done_reason = DoneReason::success;
    } else if (d_obstacle <= 0.0) {
        state.done_reason = DoneReason::collision;
    } else if (state.step >= config.max_steps) {
        state.done_reason = DoneReason::timeout;
    }

    StepOutcome out;
    out.breach_minor = hz.distance < config.r_minor;
    out.breach_major = hz.distance < config.r_major;
    out.terminal = state.done_reason != DoneReason::running;
    out.reward = transition_reward(state, out.breach_major, out.breach_minor, config);
    out.observation = observe(state, config);
    out.info = {state.pos, d_goal, hz.distance};
    return out;
}

}  // namespace uavnav
