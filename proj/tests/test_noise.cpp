#include <doctest.h>

#include <cmath>

#include "uavnav/noise.hpp"

using namespace uavnav;

TEST_SUITE("noise") {

TEST_CASE("zero noise is the identity") {
    RngStream s(1);
    const Vec2 p{1.0, 2.0};
    CHECK(perturb_position(p, {0.0, 0.0}, s) == p);
}

TEST_CASE("pure bias is an exact constant offset") {
    RngStream s(2);
    const Vec2 p{1.0, 2.0};
    const Vec2 q = perturb_position(p, {0.15, 0.0}, s);
    CHECK(q.x == 1.15);
    CHECK(q.y == 2.15);
}

TEST_CASE("sample moments match the law") {
    RngStream s(3);
    const NoiseSpec spec{0.0, 1.0};
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    const Vec2 origin{0.0, 0.0};
    for (int i = 0; i < n / 2; ++i) {
        const Vec2 q = perturb_position(origin, spec, s);
        sum += q.x + q.y;
        sq += q.x * q.x + q.y * q.y;
    }
    const double mean = sum / n;
    const double stddev = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(mean - 0.0) < 0.02);
    CHECK(std::abs(stddev - 1.0) < 0.02);
}

TEST_CASE("same stream and call order give the same noise sequence") {
    RngStream a(9), b(9);
    const NoiseSpec spec{0.1, 0.7};
    for (int i = 0; i < 100; ++i) {
        CHECK(perturb_position({0, 0}, spec, a) == perturb_position({0, 0}, spec, b));
    }
}

TEST_CASE("composition adds means and variances") {
    const NoiseSpec a = compose({0.15, 0.0}, {0.0, 0.8});
    CHECK(a.mu == 0.15);
    CHECK(a.sigma == 0.8);

    const NoiseSpec zero = compose({0.0, 0.0}, {0.0, 0.0});
    CHECK(zero.mu == 0.0);
    CHECK(zero.sigma == 0.0);

    const NoiseSpec pyth = compose({0.0, 0.3}, {0.0, 0.4});
    CHECK(pyth.sigma == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("composition is commutative and associative in its parameters") {
    RngStream s(4);
    for (int i = 0; i < 50; ++i) {
        const NoiseSpec a{s.uniform(-0.5, 0.5), s.uniform(0.0, 2.0)};
        const NoiseSpec b{s.uniform(-0.5, 0.5), s.uniform(0.0, 2.0)};
        const NoiseSpec c{s.uniform(-0.5, 0.5), s.uniform(0.0, 2.0)};
        const NoiseSpec ab = compose(a, b);
        const NoiseSpec ba = compose(b, a);
        CHECK(ab.mu == doctest::Approx(ba.mu).epsilon(1e-12));
        CHECK(ab.sigma == doctest::Approx(ba.sigma).epsilon(1e-12));
        const NoiseSpec abc1 = compose(compose(a, b), c);
        const NoiseSpec abc2 = compose(a, compose(b, c));
        CHECK(abc1.mu == doctest::Approx(abc2.mu).epsilon(1e-12));
        CHECK(abc1.sigma == doctest::Approx(abc2.sigma).epsilon(1e-12));
    }
}

TEST_CASE("negative sigma is rejected") {
    NoiseSpec bad{0.0, -0.1};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("perturbed observation: zero noise equals the true observation") {
    EnvConfig cfg;
    RngStream env_s(5);
    const SimState st = reset_env(cfg, env_s);
    RngStream noise_s(6);
    const Observation a = observe(st, cfg);
    const Observation b = perturb_observation(st, {0.0, 0.0}, cfg, noise_s);
    CHECK(a.dx_goal == b.dx_goal);
    CHECK(a.dy_goal == b.dy_goal);
    CHECK(a.dx_obs == b.dx_obs);
    CHECK(a.dy_obs == b.dy_obs);
}

TEST_CASE("perturbed observation: pure bias shifts the goal offset exactly") {
    EnvConfig cfg;
    cfg.x_min = -50;
    cfg.x_max = 50;
    cfg.y_min = -50;
    cfg.y_max = 50;
    cfg.obstacle_count_min = cfg.obstacle_count_max = 0;
    RngStream env_s(7);
    SimState st = reset_env(cfg, env_s);
    st.pos = {1.0, 1.0};
    st.goal = {4.0, 0.0};
    RngStream noise_s(8);
    const Observation obs = perturb_observation(st, {0.1, 0.0}, cfg, noise_s);
    CHECK(obs.dx_goal == doctest::Approx(2.9).epsilon(1e-12));
    CHECK(obs.dy_goal == doctest::Approx(-1.1).epsilon(1e-12));
}

TEST_CASE("noise can flip which obstacle looks nearest") {
    // Two obstacles straddle the midline; pure bias pushes the estimate past
    // the midpoint, so hazard selection flips. Oracle: recompute geometry
    // from the shifted point.
    EnvConfig cfg;
    cfg.x_min = -50;
    cfg.x_max = 50;
    cfg.y_min = -50;
    cfg.y_max = 50;
    cfg.obstacle_count_min = cfg.obstacle_count_max = 0;
    RngStream env_s(9);
    SimState st = reset_env(cfg, env_s);
    st.pos = {0.0, -0.1};
    st.goal = {40.0, 0.0};
    st.obstacles.push_back({{0.0, 2.0}, 0.5});
    st.obstacles.push_back({{0.0, -2.0}, 0.5});

    const Observation true_obs = observe(st, cfg);
    CHECK(true_obs.dy_obs < 0.0);  // nearer the lower obstacle

    RngStream noise_s(10);
    const NoiseSpec bias{0.2, 0.0};  // estimate at y = +0.1 -> upper obstacle
    const Observation noisy = perturb_observation(st, bias, cfg, noise_s);
    const Vec2 shifted{st.pos.x + 0.2, st.pos.y + 0.2};
    const Observation oracle = observe_from(shifted, st, cfg);
    CHECK(noisy.dy_obs == oracle.dy_obs);
    CHECK(noisy.dy_obs > 0.0);
}

}  // TEST_SUITE
