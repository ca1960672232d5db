#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>

#include "uavnav/geometry.hpp"

namespace uavnav {

// Discretized second-order low-pass section.
struct BiquadCoeffs {
    double b0 = 0, b1 = 0, b2 = 0;  // feedforward
    double a1 = 0, a2 = 0;          // feedback (a0 normalized to 1)

    double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
    // Magnitude response at omega rad/s for the given sample rate.
    double gain_at(double omega_rad_s, double sample_rate_hz) const;
};

// Second-order Bessel low-pass prototype 3/(s^2+3s+3), frequency-scaled to
// `cutoff_rad_s` and discretized by the bilinear transform with prewarping at
// the cutoff. Unity DC gain by construction. Throws std::invalid_argument if
// the cutoff is not inside (0, pi * sample_rate).
BiquadCoeffs bessel2_lowpass(double cutoff_rad_s, double sample_rate_hz);

// Direct-form-II-transposed state for one axis. Until primed, the first
// sample seeds the delay registers so the first output equals the first
// measurement (no transient toward zero at episode start).
struct BiquadState {
    double s1 = 0.0;
    double s2 = 0.0;
    bool primed = false;
};

double biquad_step(const BiquadCoeffs& c, BiquadState& st, double x);

// Per-axis biquad pair for a 2D position stream.
struct Lpf2d {
    BiquadCoeffs coeffs;
    BiquadState x_axis;
    BiquadState y_axis;
};

Vec2 lpf_step(Lpf2d& lpf, const Vec2& measurement);

// Kalman filter over [x, y, vx, vy]. The predict step integrates the
// previous realized velocity command (x <- x + v_cmd * dt) and pins the
// velocity state to that command; the update step conditions on the noisy
// position measurement.
struct KalmanState {
    std::array<double, 4> x{};    // x, y, vx, vy
    std::array<double, 16> cov{};  // row-major 4x4
    double q = 0.05;  // process-noise scale, (m/s^2)^2
    double r = 0.01;  // measurement-noise scale, m^2
    bool initialized = false;
};

KalmanState make_kalman(double q, double r);

// Returns the posterior position estimate. The first call initializes the
// state to the measurement with zero velocity. Throws std::invalid_argument
// on a non-finite measurement.
Vec2 kalman_step(KalmanState& st, const Vec2& measurement, const Vec2& prev_command, double dt);

enum class DenoiserKind { none, lpf, kalman };
const char* to_string(DenoiserKind k);
DenoiserKind parse_denoiser_kind(const std::string& s);  // throws on unknown name

struct FilterConfig {
    DenoiserKind kind = DenoiserKind::none;
    double lpf_cutoff_rad_s = 2.0;
    double kalman_q = 0.05;
    // When unset, r defaults to sigma^2 of the active noise (0.01 if sigma=0).
    std::optional<double> kalman_r;

    double resolved_kalman_r(double noise_sigma) const {
        if (kalman_r) return *kalman_r;
        return noise_sigma > 0.0 ? noise_sigma * noise_sigma : 0.01;
    }
};

using DenoiserState = std::variant<std::monostate, Lpf2d, KalmanState>;

DenoiserState make_denoiser_state(DenoiserKind kind, const FilterConfig& config,
                                  double noise_sigma, double sample_rate_hz);

// Dispatch: identity for `none`, otherwise the matching filter step. Throws
// std::invalid_argument when the state does not match the kind.
Vec2 denoise(DenoiserKind kind, DenoiserState& state, const Vec2& measurement,
             const Vec2& prev_command, double dt);

// Per-episode denoiser: owns the state and remembers enough to reset it.
class Denoiser {
   public:
    Denoiser() = default;
    Denoiser(DenoiserKind kind, const FilterConfig& config, double noise_sigma,
             double sample_rate_hz);

    DenoiserKind kind() const { return kind_; }
    Vec2 step(const Vec2& measurement, const Vec2& prev_command, double dt) {
        return denoise(kind_, state_, measurement, prev_command, dt);
    }
    void reset();  // forget all filter memory (new episode)

   private:
    DenoiserKind kind_ = DenoiserKind::none;
    DenoiserState state_;
    DenoiserState initial_;
};

}  // namespace uavnav
