#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavnav/env.hpp"
#include "uavnav/filters.hpp"
#include "uavnav/noise.hpp"
#include "uavnav/ppo.hpp"

namespace uavnav {

enum class SweepKind { unbiased, bias_only, biased_grid };
const char* to_string(SweepKind k);
SweepKind parse_sweep_kind(const std::string& s);

// [noise] section: the sensor law plus optionally injected unbiased noise;
// the effective law is their composition.
struct NoiseSection {
    double mu = 0.0;
    double sigma = 0.0;
    double injected_mu = 0.0;
    double injected_sigma = 0.0;

    NoiseSpec effective() const {
        return compose(NoiseSpec{mu, sigma}, NoiseSpec{injected_mu, injected_sigma});
    }
};

struct SweepSettings {
    SweepKind kind = SweepKind::unbiased;
    double mu_min = 0.0, mu_max = 0.3, mu_step = 0.01;
    double sigma_min = 0.0, sigma_max = 3.0, sigma_step = 0.1;
    long episodes_per_cell = 200;
    std::vector<DenoiserKind> denoisers = {DenoiserKind::none};
    uint64_t seed = 1;
};

struct RunConfig {
    EnvConfig env;
    NoiseSection noise;
    FilterConfig filter;
    PpoConfig ppo;
    SweepSettings sweep;
};

// Flat-sectioned text config ([env]/[noise]/[filter]/[ppo]/[sweep], key =
// value). Missing keys keep their defaults; unknown sections or keys are
// errors with file/line diagnostics.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

// Writes every key of every section (a load round-trips to the same config).
void save_config(const RunConfig& config, const std::string& path);
std::string config_to_text(const RunConfig& config);

}  // namespace uavnav
