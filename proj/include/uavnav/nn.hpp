#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavnav/rng.hpp"

namespace uavnav {

enum class HeadActivation { identity, tanh_head };
const char* to_string(HeadActivation h);
HeadActivation parse_head_activation(const std::string& s);

// Orthogonal rows/columns (whichever is the smaller dimension), scaled by
// `gain`. Returned row-major rows x cols.
template <typename T>
std::vector<T> orthogonal_init(int rows, int cols, double gain, RngStream& stream);

// Dense tanh MLP with a configurable head activation. Parameters live in one
// flat vector, per layer: weights row-major (out x in), then biases. tanh on
// every hidden layer; the head is tanh (actor means) or identity (critic).
template <typename T>
struct Mlp {
    std::vector<int> sizes;  // at least {in, out}
    HeadActivation head = HeadActivation::identity;
    std::vector<T> params;

    // Layer-wise post-activations from a forward pass; acts[0] is the input.
    struct Cache {
        std::vector<std::vector<T>> acts;
    };

    static Mlp create(std::vector<int> layer_sizes, HeadActivation head_activation,
                      RngStream* init_stream, double output_gain);

    int in_dim() const { return sizes.front(); }
    int out_dim() const { return sizes.back(); }
    int layer_count() const { return static_cast<int>(sizes.size()) - 1; }
    std::size_t param_count() const;

    std::vector<T> forward(std::span<const T> input, Cache* cache = nullptr) const;

    // Exact reverse-mode gradient of a scalar loss w.r.t. every parameter,
    // given dL/d(output). Layout matches `params`.
    std::vector<T> backward(const Cache& cache, std::span<const T> output_grad) const;
};

using MlpF = Mlp<float>;
using MlpD = Mlp<double>;

struct AdamConfig {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Element-wise moments; shared step counter. Moments are kept in double so
// the update math is identical for float and double parameters.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// Standard Adam with bias correction. Throws std::runtime_error on
// non-finite gradients (the update is not applied).
template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamState& state,
               const AdamConfig& config);

// Diagonal Gaussian over the action vector with state-independent log-std.
double gaussian_log_prob(std::span<const float> mean, std::span<const float> log_std,
                         std::span<const float> action);
double gaussian_entropy(std::span<const float> log_std);
std::vector<float> gaussian_sample(std::span<const float> mean, std::span<const float> log_std,
                                   RngStream& stream);

// ---- template implementations ----

template <typename T>
std::vector<T> orthogonal_init(int rows, int cols, double gain, RngStream& stream) {
    // Gram-Schmidt over the smaller dimension of a Gaussian matrix.
    const bool wide = cols > rows;
    const int n_vecs = wide ? rows : cols;
    const int dim = wide ? cols : rows;

    std::vector<std::vector<double>> basis(n_vecs, std::vector<double>(dim));
    for (auto& v : basis)
        for (auto& x : v) x = stream.normal();
    for (int i = 0; i < n_vecs; ++i) {
        for (int j = 0; j < i; ++j) {
            double proj = 0.0;
            for (int k = 0; k < dim; ++k) proj += basis[i][k] * basis[j][k];
            for (int k = 0; k < dim; ++k) basis[i][k] -= proj * basis[j][k];
        }
        double norm = 0.0;
        for (double x : basis[i]) norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-12) throw std::runtime_error("orthogonal_init: degenerate draw");
        for (double& x : basis[i]) x /= norm;
    }

    std::vector<T> out(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const double v = wide ? basis[r][c] : basis[c][r];
            out[static_cast<std::size_t>(r) * cols + c] = static_cast<T>(gain * v);
        }
    return out;
}

template <typename T>
Mlp<T> Mlp<T>::create(std::vector<int> layer_sizes, HeadActivation head_activation,
                      RngStream* init_stream, double output_gain) {
    if (layer_sizes.size() < 2) throw std::invalid_argument("mlp needs at least two layer sizes");
    for (int s : layer_sizes)
        if (s <= 0) throw std::invalid_argument("mlp layer sizes must be positive");

    Mlp net;
    net.sizes = std::move(layer_sizes);
    net.head = head_activation;
    net.params.reserve(net.param_count());
    for (int l = 0; l + 1 < static_cast<int>(net.sizes.size()); ++l) {
        const int in = net.sizes[l];
        const int out = net.sizes[l + 1];
        const bool is_output = (l + 2 == static_cast<int>(net.sizes.size()));
        const double gain = is_output ? output_gain : std::sqrt(2.0);
        std::vector<T> w;
        if (init_stream) {
            w = orthogonal_init<T>(out, in, gain, *init_stream);
        } else {
            w.assign(static_cast<std::size_t>(out) * in, T{0});
        }
        net.params.insert(net.params.end(), w.begin(), w.end());
        net.params.insert(net.params.end(), out, T{0});  // biases
    }
    return net;
}

template <typename T>
std::size_t Mlp<T>::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        n += static_cast<std::size_t>(sizes[l + 1]) * sizes[l] + sizes[l + 1];
    }
    return n;
}

template <typename T>
std::vector<T> Mlp<T>::forward(std::span<const T> input, Cache* cache) const {
    if (static_cast<int>(input.size()) != in_dim()) {
        throw std::invalid_argument("mlp forward: input size mismatch");
    }
    if (cache) {
        cache->acts.assign(1, std::vector<T>(input.begin(), input.end()));
        cache->acts.reserve(sizes.size());
    }

    std::vector<T> a(input.begin(), input.end());
    std::size_t offset = 0;
    for (int l = 0; l + 1 < static_cast<int>(sizes.size()); ++l) {
        const int in = sizes[l];
        const int out = sizes[l + 1];
        const T* w = params.data() + offset;
        const T* b = w + static_cast<std::size_t>(out) * in;
        std::vector<T> z(out);
        for (int r = 0; r < out; ++r) {
            T acc = b[r];
            const T* row = w + static_cast<std::size_t>(r) * in;
            for (int c = 0; c < in; ++c) acc += row[c] * a[c];
            z[r] = acc;
        }
        const bool is_output = (l + 2 == static_cast<int>(sizes.size()));
        if (!is_output || head == HeadActivation::tanh_head) {
            for (T& v : z) v = std::tanh(v);
        }
        a = std::move(z);
        if (cache) cache->acts.push_back(a);
        offset += static_cast<std::size_t>(out) * in + out;
    }
    return a;
}

template <typename T>
std::vector<T> Mlp<T>::backward(const Cache& cache, std::span<const T> output_grad) const {
    if (cache.acts.size() != sizes.size()) {
        throw std::invalid_argument("mlp backward: cache does not match network depth");
    }
    if (static_cast<int>(output_grad.size()) != out_dim()) {
        throw std::invalid_argument("mlp backward: output gradient size mismatch");
    }

    std::vector<T> grads(params.size(), T{0});

    // Per-layer parameter offsets.
    std::vector<std::size_t> offsets(layer_count());
    std::size_t off = 0;
    for (int l = 0; l < layer_count(); ++l) {
        offsets[l] = off;
        off += static_cast<std::size_t>(sizes[l + 1]) * sizes[l] + sizes[l + 1];
    }

    std::vector<T> delta(output_grad.begin(), output_grad.end());
    for (int l = layer_count() - 1; l >= 0; --l) {
        const int in = sizes[l];
        const int out = sizes[l + 1];
        const auto& a_out = cache.acts[l + 1];
        const auto& a_in = cache.acts[l];
        const bool is_output = (l + 1 == layer_count());

        // Through the activation: tanh'(z) = 1 - tanh(z)^2.
        if (!is_output || head == HeadActivation::tanh_head) {
            for (int r = 0; r < out; ++r) delta[r] *= (T{1} - a_out[r] * a_out[r]);
        }

        T* gw = grads.data() + offsets[l];
        T* gb = gw + static_cast<std::size_t>(out) * in;
        const T* w = params.data() + offsets[l];
        std::vector<T> next_delta(in, T{0});
        for (int r = 0; r < out; ++r) {
            const T d = delta[r];
            gb[r] += d;
            T* grow = gw + static_cast<std::size_t>(r) * in;
            const T* wrow = w + static_cast<std::size_t>(r) * in;
            for (int c = 0; c < in; ++c) {
                grow[c] += d * a_in[c];
                next_delta[c] += d * wrow[c];
            }
        }
        delta = std::move(next_delta);
    }
    return grads;
}

template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamState& state,
               const AdamConfig& config) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw std::invalid_argument("adam_step: size mismatch");
    }
    for (const T g : grads) {
        if (!std::isfinite(static_cast<double>(g))) {
            throw std::runtime_error("adam_step: non-finite gradient; update aborted");
        }
    }
    state.step += 1;
    const double b1 = config.beta1;
    const double b2 = config.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = static_cast<double>(grads[i]);
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] = static_cast<T>(static_cast<double>(params[i]) -
                                   config.lr * m_hat / (std::sqrt(v_hat) + config.eps));
    }
}

}  // namespace uavnav
