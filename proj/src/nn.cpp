#include "uavnav/nn.hpp"

#include <string>

namespace uavnav {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // log(2*pi)
}

const char* to_string(HeadActivation h) {
    return h == HeadActivation::tanh_head ? "tanh" : "identity";
}

HeadActivation parse_head_activation(const std::string& s) {
    if (s == "tanh") return HeadActivation::tanh_head;
    if (s == "identity") return HeadActivation::identity;
    throw std::invalid_argument("unknown head activation: " + s);
}

double gaussian_log_prob(std::span<const float> mean, std::span<const float> log_std,
                         std::span<const float> action) {
    if (mean.size() != log_std.size() || mean.size() != action.size()) {
        throw std::invalid_argument("gaussian_log_prob: size mismatch");
    }
    double lp = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const double ls = log_std[i];
        const double z = (static_cast<double>(action[i]) - mean[i]) / std::exp(ls);
        lp += -ls - 0.5 * kLog2Pi - 0.5 * z * z;
    }
    return lp;
}

double gaussian_entropy(std::span<const float> log_std) {
    double h = 0.0;
    for (const float ls : log_std) h += ls + 0.5 * (kLog2Pi + 1.0);
    return h;
}

std::vector<float> gaussian_sample(std::span<const float> mean, std::span<const float> log_std,
                                   RngStream& stream) {
    if (mean.size() != log_std.size()) throw std::invalid_argument("gaussian_sample: size mismatch");
    std::vector<float> out(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) {
        out[i] = static_cast<float>(mean[i] + std::exp(static_cast<double>(log_std[i])) * stream.normal());
    }
    return out;
}

}  // namespace uavnav
