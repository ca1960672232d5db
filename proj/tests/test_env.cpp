#include <doctest.h>

#include <cmath>
#include <map>

#include "uavnav/env.hpp"

using namespace uavnav;

namespace {

EnvConfig table_config() { return EnvConfig{}; }

EnvConfig open_arena() {
    // Big arena, no obstacles, unit-scale kinematics for hand arithmetic.
    EnvConfig cfg;
    cfg.x_min = -50;
    cfg.x_max = 50;
    cfg.y_min = -50;
    cfg.y_max = 50;
    cfg.obstacle_count_min = cfg.obstacle_count_max = 0;
    cfg.v_max = 2.0;
    cfg.dt = 1.0;
    cfg.max_steps = 1000;
    return cfg;
}

SimState state_at(const Vec2& pos, const Vec2& goal, const EnvConfig& cfg) {
    RngStream s(1);
    SimState st = reset_env(cfg, s);
    st.pos = pos;
    st.goal = goal;
    return st;
}

}  // namespace

TEST_SUITE("env") {

TEST_CASE("config invariants are enforced") {
    EnvConfig cfg;
    CHECK_NOTHROW(cfg.validate());

    EnvConfig bad = cfg;
    bad.x_min = bad.x_max;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.r_major = bad.r_minor;  // major must be the inner bound
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.obstacle_count_min = 3;
    bad.obstacle_count_max = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.reward.r_fail = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("reset: spawn and goal geometry") {
    EnvConfig cfg = table_config();
    cfg.obstacle_count_min = cfg.obstacle_count_max = 0;
    RngStream s(21);
    for (int i = 0; i < 100; ++i) {
        const SimState st = reset_env(cfg, s);
        CHECK(st.pos.x == cfg.x_min + cfg.r_minor);
        CHECK(st.pos.y >= cfg.y_min + cfg.r_minor);
        CHECK(st.pos.y <= cfg.y_max - cfg.r_minor);
        CHECK(st.goal.x == cfg.x_max - cfg.r_minor);
        CHECK(st.goal.y == 0.5 * (cfg.y_min + cfg.y_max));
        CHECK(st.obstacles.empty());

        // Goal x-offset is the arena width minus both insets, whatever y is.
        const Observation obs = observe(st, cfg);
        CHECK(obs.dx_goal == doctest::Approx((cfg.x_max - cfg.x_min) - 2 * cfg.r_minor).epsilon(1e-12));
    }
}

TEST_CASE("reset: identical layout for identical seed") {
    const EnvConfig cfg = table_config();
    RngStream a(77), b(77);
    const SimState sa = reset_env(cfg, a);
    const SimState sb = reset_env(cfg, b);
    CHECK(sa.pos == sb.pos);
    REQUIRE(sa.obstacles.size() == sb.obstacles.size());
    for (std::size_t i = 0; i < sa.obstacles.size(); ++i) {
        CHECK(sa.obstacles[i].center == sb.obstacles[i].center);
        CHECK(sa.obstacles[i].radius == sb.obstacles[i].radius);
    }
}

TEST_CASE("reset: obstacle count is uniform over its range") {
    EnvConfig cfg = table_config();
    cfg.obstacle_count_min = 1;
    cfg.obstacle_count_max = 3;
    RngStream s(5);
    const int n = 10000;
    std::map<int, int> counts;
    for (int i = 0; i < n; ++i) counts[static_cast<int>(reset_env(cfg, s).obstacles.size())] += 1;

    REQUIRE(counts.size() == 3);
    // Each bin is Binomial(n, 1/3): mean n/3, sd sqrt(n * 1/3 * 2/3).
    const double expect = n / 3.0;
    const double sd = std::sqrt(n * (1.0 / 3.0) * (2.0 / 3.0));
    for (const auto& [k, c] : counts) {
        CAPTURE(k);
        CHECK(std::abs(c - expect) < 3.0 * sd);
    }
}

TEST_CASE("reset: obstacles clear the spawn/goal discs and stay in bounds") {
    EnvConfig cfg = table_config();
    cfg.obstacle_count_min = cfg.obstacle_count_max = 3;
    RngStream s(6);
    for (int i = 0; i < 500; ++i) {
        const SimState st = reset_env(cfg, s);
        for (const Obstacle& o : st.obstacles) {
            CHECK((o.center - st.pos).norm() > cfg.r_minor + o.radius);
            CHECK((o.center - st.goal).norm() > cfg.r_minor + o.radius);
            CHECK(o.center.x >= st.pos.x);
            CHECK(o.center.x <= st.goal.x);
            CHECK(o.center.y >= cfg.y_min + o.radius);
            CHECK(o.center.y <= cfg.y_max - o.radius);
        }
    }
}

TEST_CASE("reset: over-dense config fails loudly") {
    EnvConfig cfg = table_config();
    // Arena barely wider than the insets: no room for any obstacle clear of
    // the spawn and goal discs.
    cfg.x_min = 0.0;
    cfg.x_max = 0.5;
    cfg.y_min = 0.0;
    cfg.y_max = 0.5;
    cfg.obstacle_count_min = cfg.obstacle_count_max = 4;
    cfg.obstacle_radius = 0.2;
    RngStream s(9);
    CHECK_THROWS_AS(reset_env(cfg, s), std::runtime_error);
}

TEST_CASE("step: velocity normalization") {
    // Direction (0.6, 0.8) is already unit; full-speed command with
    // v_max = 2, dt = 1 moves exactly (1.2, 1.6).
    const EnvConfig cfg = open_arena();
    SimState st = state_at({0, 0}, {40, 0}, cfg);
    const StepOutcome out = step_env(st, Action{0.6, 0.8, 1.0}, cfg);
    CHECK(st.pos.x == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(st.pos.y == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(st.step == 1);
    CHECK_FALSE(out.terminal);
}

TEST_CASE("step: zero commanded speed leaves the position unchanged") {
    const EnvConfig cfg = open_arena();
    SimState st = state_at({3, 4}, {40, 0}, cfg);
    step_env(st, Action{0.6, 0.8, -1.0}, cfg);  // vmag_raw=-1 maps to speed 0
    CHECK(st.pos == Vec2{3, 4});
    CHECK(st.step == 1);
}

TEST_CASE("step: zero direction means zero velocity") {
    const EnvConfig cfg = open_arena();
    SimState st = state_at({3, 4}, {40, 0}, cfg);
    step_env(st, Action{0.0, 0.0, 1.0}, cfg);
    CHECK(st.pos == Vec2{3, 4});
}

TEST_CASE("step: raw components are clamped to [-1, 1]") {
    const EnvConfig cfg = open_arena();
    const Vec2 a = velocity_command(Action{5.0, 0.0, 9.0}, cfg);
    const Vec2 b = velocity_command(Action{1.0, 0.0, 1.0}, cfg);
    CHECK(a == b);
}

TEST_CASE("step: reaching the goal pays the success reward") {
    const EnvConfig cfg = open_arena();
    SimState st = state_at({39.0, 0.0}, {40.0, 0.0}, cfg);
    // One full-speed step toward the goal: lands at 41 > 40... aim exactly.
    SimState st2 = state_at({38.05, 0.0}, {40.0, 0.0}, cfg);
    const StepOutcome out = step_env(st2, Action{1.0, 0.0, 1.0}, cfg);  // +2 m
    CHECK(out.terminal);
    CHECK(st2.done_reason == DoneReason::success);
    CHECK(out.reward == 1000.0);
    (void)st;
}

TEST_CASE("step: entering an obstacle terminates with the failure penalty") {
    EnvConfig cfg = open_arena();
    SimState st = state_at({0, 0}, {40, 0}, cfg);
    st.obstacles.push_back({{2.0, 0.0}, 0.5});
    const StepOutcome out = step_env(st, Action{1.0, 0.0, 1.0}, cfg);  // lands at (2,0), inside
    CHECK(out.terminal);
    CHECK(st.done_reason == DoneReason::collision);
    CHECK(out.reward == -1000.0);
}

TEST_CASE("step: running out of time terminates with the failure penalty") {
    EnvConfig cfg = open_arena();
    cfg.max_steps = 3;
    SimState st = state_at({0, 0}, {40, 0}, cfg);
    StepOutcome out;
    for (int i = 0; i < 3; ++i) out = step_env(st, Action{0, 0, -1}, cfg);
    CHECK(out.terminal);
    CHECK(st.done_reason == DoneReason::timeout);
    CHECK(out.reward == -1000.0);
    CHECK_THROWS_AS(step_env(st, Action{0, 0, -1}, cfg), std::logic_error);
}

TEST_CASE("step: success wins over a simultaneous timeout") {
    EnvConfig cfg = open_arena();
    cfg.max_steps = 1;
    SimState st = state_at({38.05, 0.0}, {40.0, 0.0}, cfg);
    const StepOutcome out = step_env(st, Action{1.0, 0.0, 1.0}, cfg);
    CHECK(st.done_reason == DoneReason::success);
    CHECK(out.reward == 1000.0);
}

TEST_CASE("step: position never leaves the arena") {
    EnvConfig cfg = table_config();
    cfg.obstacle_count_min = cfg.obstacle_count_max = 0;
    RngStream s(33);
    SimState st = reset_env(cfg, s);
    RngStream actions(34);
    for (int i = 0; i < 400 && st.done_reason == DoneReason::running; ++i) {
        step_env(st,
                 Action{actions.uniform(-1, 1), actions.uniform(-1, 1), actions.uniform(-1, 1)},
                 cfg);
        CHECK(st.pos.x >= cfg.x_min);
        CHECK(st.pos.x <= cfg.x_max);
        CHECK(st.pos.y >= cfg.y_min);
        CHECK(st.pos.y <= cfg.y_max);
    }
}

TEST_CASE("step: wall contact breaches but does not terminate") {
    EnvConfig cfg = table_config();
    cfg.obstacle_count_min = cfg.obstacle_count_max = 0;
    RngStream s(35);
    SimState st = reset_env(cfg, s);
    st.pos = {2.5, cfg.y_max - 0.01};
    StepOutcome out = step_env(st, Action{0.0, 1.0, 1.0}, cfg);  // push into the top wall
    CHECK(st.pos.y == cfg.y_max);
    CHECK(out.breach_minor);
    CHECK(out.breach_major);
    CHECK_FALSE(out.terminal);
    out = step_env(st, Action{0.0, 1.0, 1.0}, cfg);  // stay clamped: still only a breach
    CHECK_FALSE(out.terminal);
}

TEST_CASE("observe: goal offset is a plain vector difference") {
    const EnvConfig cfg = open_arena();
    SimState st = state_at({1, 1}, {4, 0}, cfg);
    const Observation obs = observe(st, cfg);
    CHECK(obs.dx_goal == 3.0);
    CHECK(obs.dy_goal == -1.0);
}

TEST_CASE("observe: nearest obstacle surface point") {
    const EnvConfig cfg = open_arena();
    SimState st = state_at({0, 0}, {40, 0}, cfg);
    st.obstacles.push_back({{2.0, 0.0}, 0.5});
    const Observation obs = observe(st, cfg);
    // Closest surface point oracle: center - radius * unit(center - pos).
    const Vec2 expected = Vec2{2.0, 0.0} - Vec2{2.0, 0.0}.unit_or_zero() * 0.5;
    CHECK(obs.dx_obs == doctest::Approx(expected.x).epsilon(1e-12));
    CHECK(obs.dy_obs == doctest::Approx(expected.y).epsilon(1e-12));
    CHECK(obs.dx_obs == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(obs.dy_obs == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("observe: equidistant obstacles break ties toward the lower index") {
    const EnvConfig cfg = open_arena();
    SimState st = state_at({0, 0}, {40, 0}, cfg);
    st.obstacles.push_back({{0.0, 2.0}, 0.5});   // index 0, above
    st.obstacles.push_back({{0.0, -2.0}, 0.5});  // index 1, below, same distance
    const Observation obs = observe(st, cfg);
    CHECK(obs.dy_obs > 0.0);  // points at index 0
    CHECK(nearest_hazard(st.pos, st, cfg).index == 0);
}

TEST_CASE("observe: with no obstacles the nearest wall is the hazard") {
    EnvConfig cfg = table_config();
    cfg.obstacle_count_min = cfg.obstacle_count_max = 0;
    RngStream s(40);
    SimState st = reset_env(cfg, s);
    st.pos = {2.5, 1.9};  // 0.1 m from the top wall
    const Observation obs = observe(st, cfg);
    CHECK(obs.dx_obs == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(obs.dy_obs == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(nearest_hazard(st.pos, st, cfg).index == static_cast<int>(st.obstacles.size()) + 3);
}

TEST_CASE("reward: table constants reproduce exactly") {
    const EnvConfig cfg = table_config();
    SimState st;
    st.goal = {4.8, 0.0};

    st.done_reason = DoneReason::success;
    CHECK(transition_reward(st, false, false, cfg) == 1000.0);
    st.done_reason = DoneReason::collision;
    CHECK(transition_reward(st, true, true, cfg) == -1000.0);
    st.done_reason = DoneReason::timeout;
    CHECK(transition_reward(st, false, false, cfg) == -1000.0);

    st.done_reason = DoneReason::running;
    st.pos = {4.3, 0.0};  // 0.5 m from the goal
    CHECK(transition_reward(st, false, false, cfg) == -2.0);
    CHECK(transition_reward(st, false, true, cfg) == -3.0);
    CHECK(transition_reward(st, true, true, cfg) == -8.0);
}

TEST_CASE("reward: exactly one branch fires per step") {
    EnvConfig cfg = table_config();
    cfg.obstacle_count_min = cfg.obstacle_count_max = 1;
    RngStream s(50);
    RngStream actions(51);
    for (int ep = 0; ep < 30; ++ep) {
        SimState st = reset_env(cfg, s);
        while (st.done_reason == DoneReason::running) {
            const StepOutcome out = step_env(
                st, Action{actions.uniform(-1, 1), actions.uniform(-1, 1), actions.uniform(-1, 1)},
                cfg);
            if (out.terminal) {
                CHECK((out.reward == 1000.0 || out.reward == -1000.0));
            } else {
                CHECK(out.reward < 0.0);
                const double d = out.info.dist_to_goal;
                const double base = -cfg.reward.r_dist_coeff * d;
                const double with_minor = base - cfg.reward.r_minor_penalty;
                const double with_both =
                    base - cfg.reward.r_minor_penalty - cfg.reward.r_major_penalty;
                const bool matches = std::abs(out.reward - base) < 1e-12 ||
                                     std::abs(out.reward - with_minor) < 1e-12 ||
                                     std::abs(out.reward - with_both) < 1e-12;
                CHECK(matches);
            }
        }
    }
}

TEST_CASE("reward: breach flags are monotone in proximity") {
    EnvConfig cfg = table_config();
    cfg.obstacle_count_min = cfg.obstacle_count_max = 1;
    RngStream s(52);
    RngStream actions(53);
    for (int ep = 0; ep < 20; ++ep) {
        SimState st = reset_env(cfg, s);
        while (st.done_reason == DoneReason::running) {
            const StepOutcome out = step_env(
                st, Action{actions.uniform(-1, 1), actions.uniform(-1, 1), actions.uniform(-1, 1)},
                cfg);
            if (out.breach_major) CHECK(out.breach_minor);
        }
    }
}

TEST_CASE("episode return without a success is strictly negative") {
    EnvConfig cfg = table_config();
    cfg.obstacle_count_min = cfg.obstacle_count_max = 0;
    RngStream s(54);
    SimState st = reset_env(cfg, s);
    double ret = 0.0;
    while (st.done_reason == DoneReason::running) {
        ret += step_env(st, Action{0, 0, -1}, cfg).reward;  // hover until timeout
    }
    CHECK(st.done_reason == DoneReason::timeout);
    CHECK(ret < 0.0);
}

TEST_CASE("trajectories are bit-exact for identical seeds and actions") {
    const EnvConfig cfg = table_config();
    RngStream s1(60), s2(60);
    SimState a = reset_env(cfg, s1);
    SimState b = reset_env(cfg, s2);
    RngStream act1(61), act2(61);
    for (int i = 0; i < 100 && a.done_reason == DoneReason::running; ++i) {
        const Action act{act1.uniform(-1, 1), act1.uniform(-1, 1), act1.uniform(-1, 1)};
        const Action bct{act2.uniform(-1, 1), act2.uniform(-1, 1), act2.uniform(-1, 1)};
        const StepOutcome oa = step_env(a, act, cfg);
        const StepOutcome ob = step_env(b, bct, cfg);
        CHECK(a.pos == b.pos);
        CHECK(oa.reward == ob.reward);
        if (oa.terminal) break;
    }
}

}  // TEST_SUITE
