#pragma once

#include <array>
#include <vector>

#include "uavnav/geometry.hpp"
#include "uavnav/rng.hpp"

namespace uavnav {

struct RewardParams {
    double r_success = 1000.0;     // terminal reward on reaching the target
    double r_fail = -1000.0;       // terminal penalty on collision or timeout
    double r_dist_coeff = 4.0;     // per-meter distance penalty, each non-terminal step
    double r_major_penalty = 5.0;  // within r_major of a hazard surface
    double r_minor_penalty = 1.0;  // within r_minor of a hazard surface

    void validate() const;
};

struct EnvConfig {
    // Arena bounds in meters. Altitude is held constant at (z_min+z_max)/2;
    // motion is planar.
    double x_min = 0.0, x_max = 5.0;
    double y_min = -2.0, y_max = 2.0;
    double z_min = 0.0, z_max = 1.0;

    // Safety-bound radii around hazard surfaces. r_minor is the outer,
    // first-breached bound (r_major < r_minor).
    double r_minor = 0.2;
    double r_major = 0.1;

    double eps_success = 0.1;  // target reached when closer than this
    double eps_safe = 0.2;     // reporting-only safety distance to hazards

    int obstacle_count_min = 1;
    int obstacle_count_max = 3;
    double obstacle_radius = 0.15;
    double obstacle_y_sigma = 2.0 / 3.0;  // std-dev of obstacle y placement

    double v_max = 0.5;  // m/s
    double dt = 0.05;    // control period, s
    int max_steps = 400;

    RewardParams reward;

    void validate() const;  // throws std::invalid_argument on a bad field

    double altitude() const { return 0.5 * (z_min + z_max); }
    double arena_diagonal() const { return std::hypot(x_max - x_min, y_max - y_min); }
    double sample_rate_hz() const { return 1.0 / dt; }
};

struct Obstacle {
    Vec2 center;
    double radius = 0.0;
};

enum class DoneReason { running, success, collision, timeout };
const char* to_string(DoneReason r);

struct SimState {
    Vec2 pos;  // true UAV position
    Vec2 goal;
    std::vector<Obstacle> obstacles;
    int step = 0;
    DoneReason done_reason = DoneReason::running;
};

// Offsets measured from the (true, noisy, or denoised) UAV position to the
// goal and to the closest point on the nearest hazard surface.
struct Observation {
    double dx_goal = 0.0;
    double dy_goal = 0.0;
    double dx_obs = 0.0;
    double dy_obs = 0.0;

    std::array<double, 4> as_array() const { return {dx_goal, dy_goal, dx_obs, dy_obs}; }
};

// Raw network outputs; components are clamped to [-1, 1] at the environment
// boundary before the velocity command is formed.
struct Action {
    double vx_raw = 0.0;
    double vy_raw = 0.0;
    double vmag_raw = 0.0;
};

struct StepInfo {
    Vec2 true_pos;
    double dist_to_goal = 0.0;
    double dist_to_nearest_hazard = 0.0;  // obstacle surfaces and arena walls
};

struct StepOutcome {
    Observation observation;  // computed from the true position
    double reward = 0.0;
    bool terminal = false;
    bool breach_major = false;
    bool breach_minor = false;
    StepInfo info;
};

// Nearest hazard surface as seen from a point. Hazards are the obstacle
// surfaces followed by the four arena walls (left, right, bottom, top); ties
// break toward the lowest index.
struct HazardInfo {
    double distance = 0.0;  // negative inside an obstacle
    Vec2 surface_point;
    int index = -1;
};

HazardInfo nearest_hazard(const Vec2& p, const SimState& state, const EnvConfig& config);

// Spawns the UAV, places the goal, and draws the obstacle layout. Throws
// std::runtime_error when rejection sampling cannot place an obstacle clear
// of the spawn/goal discs within the retry budget.
SimState reset_env(const EnvConfig& config, RngStream& env_stream);

// Observation measured from an arbitrary reference point (shared by the
// true, noisy, and denoised observation paths).
Observation observe_from(const Vec2& p, const SimState& state, const EnvConfig& config);

// Observation from the true position.
Observation observe(const SimState& state, const EnvConfig& config);

// Realized velocity command: clamp raw components, normalize the direction,
// scale by the commanded speed mapped affinely from [-1,1] to [0, v_max].
Vec2 velocity_command(const Action& action, const EnvConfig& config);

// One branch fires per step: success, collision, timeout, or the dense
// distance + breach penalty. Distances use the true position.
double transition_reward(const SimState& next, bool breach_major, bool breach_minor,
                         const EnvConfig& config);

// Advances the state by one control period. Throws std::logic_error if the
// episode already ended.
StepOutcome step_env(SimState& state, const Action& action, const EnvConfig& config);

}  // namespace uavnav
