#include "uavnav/filters.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace uavnav {

namespace {

constexpr double kPi = 3.141592653589793238462643;

using Mat4 = std::array<double, 16>;

double& at(Mat4& m, int r, int c) { return m[r * 4 + c]; }
double at(const Mat4& m, int r, int c) { return m[r * 4 + c]; }

Mat4 matmul(const Mat4& a, const Mat4& b) {
    Mat4 out{};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            const double aik = at(a, i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < 4; ++j) out[i * 4 + j] += aik * at(b, k, j);
        }
    return out;
}

Mat4 transpose(const Mat4& a) {
    Mat4 out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i * 4 + j] = at(a, j, i);
    return out;
}

void symmetrize(Mat4& m) {
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            const double v = 0.5 * (at(m, i, j) + at(m, j, i));
            at(m, i, j) = v;
            at(m, j, i) = v;
        }
}

}  // namespace

double BiquadCoeffs::gain_at(double omega_rad_s, double sample_rate_hz) const {
    const std::complex<double> z = std::polar(1.0, omega_rad_s / sample_rate_hz);
    const std::complex<double> zi = 1.0 / z;
    const std::complex<double> num = b0 + b1 * zi + b2 * zi * zi;
    const std::complex<double> den = 1.0 + a1 * zi + a2 * zi * zi;
    return std::abs(num / den);
}

BiquadCoeffs bessel2_lowpass(double cutoff_rad_s, double sample_rate_hz) {
    if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be > 0");
    if (!(cutoff_rad_s > 0.0) || cutoff_rad_s >= kPi * sample_rate_hz) {
        throw std::invalid_argument("cutoff must lie in (0, pi * sample_rate)");
    }

    // Frequency-scaled analog prototype: 3*wc^2 / (s^2 + 3*wc*s + 3*wc^2).
    const double wc = cutoff_rad_s;
    const double num = 3.0 * wc * wc;
    const double lin = 3.0 * wc;
    const double cst = 3.0 * wc * wc;

    // Bilinear transform s = K (1 - z^-1) / (1 + z^-1), prewarped so the
    // analog cutoff lands exactly on the digital cutoff.
    const double half_wt = 0.5 * wc / sample_rate_hz;
    const double k = wc / std::tan(half_wt);
    const double a0 = k * k + lin * k + cst;

    BiquadCoeffs c;
    c.b0 = num / a0;
    c.b1 = 2.0 * num / a0;
    c.b2 = num / a0;
    c.a1 = (2.0 * cst - 2.0 * k * k) / a0;
    c.a2 = (k * k - lin * k + cst) / a0;
    return c;
}

double biquad_step(const BiquadCoeffs& c, BiquadState& st, double x) {
    if (!st.primed) {
        // Steady-state registers for constant input x; valid because the
        // design has unity DC gain.
        st.s1 = x * (1.0 - c.b0);
        st.s2 = x * (c.b2 - c.a2);
        st.primed = true;
    }
    const double y = c.b0 * x + st.s1;
    st.s1 = c.b1 * x - c.a1 * y + st.s2;
    st.s2 = c.b2 * x - c.a2 * y;
    return y;
}

Vec2 lpf_step(Lpf2d& lpf, const Vec2& measurement) {
    return {biquad_step(lpf.coeffs, lpf.x_axis, measurement.x),
            biquad_step(lpf.coeffs, lpf.y_axis, measurement.y)};
}

KalmanState make_kalman(double q, double r) {
    if (!(q > 0.0) || !(r > 0.0)) throw std::invalid_argument("kalman q and r must be > 0");
    KalmanState st;
    st.q = q;
    st.r = r;
    return st;
}

Vec2 kalman_step(KalmanState& st, const Vec2& measurement, const Vec2& prev_command, double dt) {
    if (!std::isfinite(measurement.x) || !std::isfinite(measurement.y)) {
        throw std::invalid_argument("kalman measurement must be finite");
    }

    if (!st.initialized) {
        st.x = {measurement.x, measurement.y, 0.0, 0.0};
        st.cov.fill(0.0);
        for (int i = 0; i < 4; ++i) at(st.cov, i, i) = 0.1;
        st.initialized = true;
        return measurement;
    }

    // Predict: position integrates the realized command, velocity state is
    // pinned to it. The command is known, so prior velocity uncertainty does
    // not propagate; q absorbs actuation/model mismatch.
    Mat4 f{};
    at(f, 0, 0) = 1.0;
    at(f, 1, 1) = 1.0;
    st.x = {st.x[0] + prev_command.x * dt, st.x[1] + prev_command.y * dt, prev_command.x,
            prev_command.y};

    Mat4 p = matmul(matmul(f, st.cov), transpose(f));
    const double q = st.q;
    const double q_pp = q * dt * dt * dt * dt / 4.0;
    const double q_pv = q * dt * dt * dt / 2.0;
    const double q_vv = q * dt * dt;
    for (int axis = 0; axis < 2; ++axis) {
        at(p, axis, axis) += q_pp;
        at(p, axis, axis + 2) += q_pv;
        at(p, axis + 2, axis) += q_pv;
        at(p, axis + 2, axis + 2) += q_vv;
    }

    // Update with the position measurement, H = [I2 0].
    const double s00 = at(p, 0, 0) + st.r;
    const double s01 = at(p, 0, 1);
    const double s10 = at(p, 1, 0);
    const double s11 = at(p, 1, 1) + st.r;
    const double det = s00 * s11 - s01 * s10;
    const double i00 = s11 / det, i01 = -s01 / det, i10 = -s10 / det, i11 = s00 / det;

    // K = P H^T S^-1  (4x2).
    std::array<double, 8> gain{};
    for (int i = 0; i < 4; ++i) {
        const double ph0 = at(p, i, 0);
        const double ph1 = at(p, i, 1);
        gain[i * 2 + 0] = ph0 * i00 + ph1 * i10;
        gain[i * 2 + 1] = ph0 * i01 + ph1 * i11;
    }

    const double innov_x = measurement.x - st.x[0];
    const double innov_y = measurement.y - st.x[1];
    for (int i = 0; i < 4; ++i) st.x[i] += gain[i * 2] * innov_x + gain[i * 2 + 1] * innov_y;

    // Joseph form keeps the covariance symmetric positive-definite.
    Mat4 ikh{};
    for (int i = 0; i < 4; ++i) at(ikh, i, i) = 1.0;
    for (int i = 0; i < 4; ++i) {
        at(ikh, i, 0) -= gain[i * 2 + 0];
        at(ikh, i, 1) -= gain[i * 2 + 1];
    }
    Mat4 next = matmul(matmul(ikh, p), transpose(ikh));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            next[i * 4 + j] += st.r * (gain[i * 2] * gain[j * 2] + gain[i * 2 + 1] * gain[j * 2 + 1]);
    symmetrize(next);
    st.cov = next;

    return {st.x[0], st.x[1]};
}

const char* to_string(DenoiserKind k) {
    switch (k) {
        case DenoiserKind::none: return "none";
        case DenoiserKind::lpf: return "lpf";
        case DenoiserKind::kalman: return "kalman";
    }
    return "?";
}

DenoiserKind parse_denoiser_kind(const std::string& s) {
    if (s == "none") return DenoiserKind::none;
    if (s == "lpf") return DenoiserKind::lpf;
    if (s == "kalman") return DenoiserKind::kalman;
    throw std::invalid_argument("unknown denoiser kind: " + s);
}

DenoiserState make_denoiser_state(DenoiserKind kind, const FilterConfig& config,
                                  double noise_sigma, double sample_rate_hz) {
    switch (kind) {
        case DenoiserKind::none: return std::monostate{};
        case DenoiserKind::lpf: {
            Lpf2d lpf;
            lpf.coeffs = bessel2_lowpass(config.lpf_cutoff_rad_s, sample_rate_hz);
            return lpf;
        }
        case DenoiserKind::kalman:
            return make_kalman(config.kalman_q, config.resolved_kalman_r(noise_sigma));
    }
    throw std::invalid_argument("unknown denoiser kind");
}

Vec2 denoise(DenoiserKind kind, DenoiserState& state, const Vec2& measurement,
             const Vec2& prev_command, double dt) {
    switch (kind) {
        case DenoiserKind::none:
            if (!std::holds_alternative<std::monostate>(state)) {
                throw std::invalid_argument("denoiser state does not match kind 'none'");
            }
            return measurement;
        case DenoiserKind::lpf: {
            Lpf2d* lpf = std::get_if<Lpf2d>(&state);
            if (!lpf) throw std::invalid_argument("denoiser state does not match kind 'lpf'");
            return lpf_step(*lpf, measurement);
        }
        case DenoiserKind::kalman: {
            KalmanState* kf = std::get_if<KalmanState>(&state);
            if (!kf) throw std::invalid_argument("denoiser state does not match kind 'kalman'");
            return kalman_step(*kf, measurement, prev_command, dt);
        }
    }
    throw std::invalid_argument("unknown denoiser kind");
}

Denoiser::Denoiser(DenoiserKind kind, const FilterConfig& config, double noise_sigma,
                   double sample_rate_hz)
    : kind_(kind),
      state_(make_denoiser_state(kind, config, noise_sigma, sample_rate_hz)),
      initial_(state_) {}

void Denoiser::reset() { state_ = initial_; }

}  // namespace uavnav
