#include "uavnav/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace uavnav {

const char* to_string(SweepKind k) {
    switch (k) {
        case SweepKind::unbiased: return "unbiased";
        case SweepKind::bias_only: return "bias_only";
        case SweepKind::biased_grid: return "biased";
    }
    return "?";
}

SweepKind parse_sweep_kind(const std::string& s) {
    if (s == "unbiased") return SweepKind::unbiased;
    if (s == "bias_only") return SweepKind::bias_only;
    if (s == "biased" || s == "biased_grid") return SweepKind::biased_grid;
    throw std::invalid_argument("unknown sweep kind: " + s);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& where) {
    std::size_t used = 0;
    double out;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": expected a number, got '" + v + "'");
    }
    if (used != v.size()) throw std::runtime_error(where + ": trailing junk in number '" + v + "'");
    return out;
}

long parse_long(const std::string& v, const std::string& where) {
    std::size_t used = 0;
    long out;
    try {
        out = std::stol(v, &used);
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": expected an integer, got '" + v + "'");
    }
    if (used != v.size())
        throw std::runtime_error(where + ": trailing junk in integer '" + v + "'");
    return out;
}

std::vector<DenoiserKind> parse_denoiser_list(const std::string& v, const std::string& where) {
    std::vector<DenoiserKind> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(parse_denoiser_kind(item));
        } catch (const std::exception& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
    }
    if (out.empty()) throw std::runtime_error(where + ": empty denoiser list");
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string& value, const std::string& where)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
    static const std::map<std::string, std::map<std::string, Setter>> table = {
        {"env",
         {
             {"x_min", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.x_min = parse_double(v, w); }},
             {"x_max", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.x_max = parse_double(v, w); }},
             {"y_min", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.y_min = parse_double(v, w); }},
             {"y_max", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.y_max = parse_double(v, w); }},
             {"z_min", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.z_min = parse_double(v, w); }},
             {"z_max", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.z_max = parse_double(v, w); }},
             {"r_minor", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.r_minor = parse_double(v, w); }},
             {"r_major", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.r_major = parse_double(v, w); }},
             {"eps_success", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.eps_success = parse_double(v, w); }},
             {"eps_safe", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.eps_safe = parse_double(v, w); }},
             {"obstacle_count_min", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.obstacle_count_min = static_cast<int>(parse_long(v, w)); }},
             {"obstacle_count_max", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.obstacle_count_max = static_cast<int>(parse_long(v, w)); }},
             {"obstacle_radius", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.obstacle_radius = parse_double(v, w); }},
             {"obstacle_y_sigma", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.obstacle_y_sigma = parse_double(v, w); }},
             {"v_max", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.v_max = parse_double(v, w); }},
             {"dt", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.dt = parse_double(v, w); }},
             {"max_steps", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.max_steps = static_cast<int>(parse_long(v, w)); }},
             {"r_success", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.reward.r_success = parse_double(v, w); }},
             {"r_fail", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.reward.r_fail = parse_double(v, w); }},
             {"r_dist_coeff", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.reward.r_dist_coeff = parse_double(v, w); }},
             {"r_major_penalty", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.reward.r_major_penalty = parse_double(v, w); }},
             {"r_minor_penalty", [](RunConfig& c, const std::string& v, const std::string& w) { c.env.reward.r_minor_penalty = parse_double(v, w); }},
         }},
        {"noise",
         {
             {"mu", [](RunConfig& c, const std::string& v, const std::string& w) { c.noise.mu = parse_double(v, w); }},
             {"sigma", [](RunConfig& c, const std::string& v, const std::string& w) { c.noise.sigma = parse_double(v, w); }},
             {"injected_mu", [](RunConfig& c, const std::string& v, const std::string& w) { c.noise.injected_mu = parse_double(v, w); }},
             {"injected_sigma", [](RunConfig& c, const std::string& v, const std::string& w) { c.noise.injected_sigma = parse_double(v, w); }},
         }},
        {"filter",
         {
             {"kind",
              [](RunConfig& c, const std::string& v, const std::string& w) {
                  try {
                      c.filter.kind = parse_denoiser_kind(v);
                  } catch (const std::exception& e) {
                      throw std::runtime_error(w + ": " + e.what());
                  }
              }},
             {"lpf.cutoff_rad_s", [](RunConfig& c, const std::string& v, const std::string& w) { c.filter.lpf_cutoff_rad_s = parse_double(v, w); }},
             {"kalman.q", [](RunConfig& c, const std::string& v, const std::string& w) { c.filter.kalman_q = parse_double(v, w); }},
             {"kalman.r", [](RunConfig& c, const std::string& v, const std::string& w) { c.filter.kalman_r = parse_double(v, w); }},
         }},
        {"ppo",
         {
             {"total_timesteps", [](RunConfig& c, const std::string& v, const std::string& w) { c.ppo.total_timesteps = parse_long(v, w); }},
             {"rollout_length", [](RunConfig& c, const std::string& v, const std::string& w) { c.ppo.rollout_length = static_cast<int>(parse_long(v, w)); }},
             {"minibatch_size", [](RunConfig& c, const std::string& v, const std::string& w) { c.ppo.minibatch_size = static_cast<int>(parse_long(v, w)); }},
             {"epochs_per_update", [](RunConfig& c, const std::string& v, const std::string& w) { c.ppo.epochs_per_update = static_cast<int>(parse_long(v, w)); }},
             {"gamma", [](RunConfig& c, const std::string& v, const std::string& w) { c.ppo.gamma = parse_double(v, w); }},
             {"gae_lambda", [](RunConfig& c, const std::string& v, const std::string& w) { c.ppo.gae_lambda = parse_double(v, w); }},
             {"clip_eps", [](RunConfig& c, const std::string& v, const std::string& w) { c.ppo.clip_eps = parse_double(v, w); }},
             {"value_coeff", [](RunConfig& c, const std::string& v, const std::string& w) { c.ppo.value_coeff = parse_double(v, w); }},
             {"entropy_coeff", [](RunConfig& c, const std::string& v, const std::string& w) { c.ppo.entropy_coeff = parse_double(v, w); }},
             {"max_grad_norm", [](RunConfig& c, const std::string& v, const std::string& w) { c.ppo.max_grad_norm = parse_double(v, w); }},
             {"n_envs", [](RunConfig& c, const std::string& v, const std::string& w) { c.ppo.n_envs = static_cast<int>(parse_long(v, w)); }},
         }},
        {"sweep",
         {
             {"kind",
              [](RunConfig& c, const std::string& v, const std::string& w) {
                  try {
                      c.sweep.kind = parse_sweep_kind(v);
                  } catch (const std::exception& e) {
                      throw std::runtime_error(w + ": " + e.what());
                  }
              }},
             {"mu_min", [](RunConfig& c, const std::string& v, const std::string& w) { c.sweep.mu_min = parse_double(v, w); }},
             {"mu_max", [](RunConfig& c, const std::string& v, const std::string& w) { c.sweep.mu_max = parse_double(v, w); }},
             {"mu_step", [](RunConfig& c, const std::string& v, const std::string& w) { c.sweep.mu_step = parse_double(v, w); }},
             {"sigma_min", [](RunConfig& c, const std::string& v, const std::string& w) { c.sweep.sigma_min = parse_double(v, w); }},
             {"sigma_max", [](RunConfig& c, const std::string& v, const std::string& w) { c.sweep.sigma_max = parse_double(v, w); }},
             {"sigma_step", [](RunConfig& c, const std::string& v, const std::string& w) { c.sweep.sigma_step = parse_double(v, w); }},
             {"episodes_per_cell", [](RunConfig& c, const std::string& v, const std::string& w) { c.sweep.episodes_per_cell = parse_long(v, w); }},
             {"denoisers", [](RunConfig& c, const std::string& v, const std::string& w) { c.sweep.denoisers = parse_denoiser_list(v, w); }},
             {"seed", [](RunConfig& c, const std::string& v, const std::string& w) { c.sweep.seed = static_cast<uint64_t>(parse_long(v, w)); }},
         }},
    };
    return table;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig config;
    const auto& table = setters();
    const std::map<std::string, Setter>* section = nullptr;
    std::string section_name;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = origin + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw std::runtime_error(where + ": unterminated section header");
            section_name = trim(line.substr(1, line.size() - 2));
            const auto it = table.find(section_name);
            if (it == table.end()) throw std::runtime_error(where + ": unknown section [" + section_name + "]");
            section = &it->second;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error(where + ": expected 'key = value'");
        if (!section) throw std::runtime_error(where + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = section->find(key);
        if (it == section->end()) {
            throw std::runtime_error(where + ": unknown key '" + key + "' in section [" +
                                     section_name + "]");
        }
        it->second(config, value, where);
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

std::string config_to_text(const RunConfig& c) {
    std::ostringstream out;
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };

    out << "[env]\n";
    out << "x_min = " << num(c.env.x_min) << "\nx_max = " << num(c.env.x_max) << "\n";
    out << "y_min = " << num(c.env.y_min) << "\ny_max = " << num(c.env.y_max) << "\n";
    out << "z_min = " << num(c.env.z_min) << "\nz_max = " << num(c.env.z_max) << "\n";
    out << "r_minor = " << num(c.env.r_minor) << "\nr_major = " << num(c.env.r_major) << "\n";
    out << "eps_success = " << num(c.env.eps_success) << "\neps_safe = " << num(c.env.eps_safe)
        << "\n";
    out << "obstacle_count_min = " << c.env.obstacle_count_min << "\n";
    out << "obstacle_count_max = " << c.env.obstacle_count_max << "\n";
    out << "obstacle_radius = " << num(c.env.obstacle_radius) << "\n";
    out << "obstacle_y_sigma = " << num(c.env.obstacle_y_sigma) << "\n";
    out << "v_max = " << num(c.env.v_max) << "\ndt = " << num(c.env.dt) << "\n";
    out << "max_steps = " << c.env.max_steps << "\n";
    out << "r_success = " << num(c.env.reward.r_success) << "\n";
    out << "r_fail = " << num(c.env.reward.r_fail) << "\n";
    out << "r_dist_coeff = " << num(c.env.reward.r_dist_coeff) << "\n";
    out << "r_major_penalty = " << num(c.env.reward.r_major_penalty) << "\n";
    out << "r_minor_penalty = " << num(c.env.reward.r_minor_penalty) << "\n";

    out << "\n[noise]\n";
    out << "mu = " << num(c.noise.mu) << "\nsigma = " << num(c.noise.sigma) << "\n";
    out << "injected_mu = " << num(c.noise.injected_mu) << "\n";
    out << "injected_sigma = " << num(c.noise.injected_sigma) << "\n";

    out << "\n[filter]\n";
    out << "kind = " << to_string(c.filter.kind) << "\n";
    out << "lpf.cutoff_rad_s = " << num(c.filter.lpf_cutoff_rad_s) << "\n";
    out << "kalman.q = " << num(c.filter.kalman_q) << "\n";
    if (c.filter.kalman_r) out << "kalman.r = " << num(*c.filter.kalman_r) << "\n";

    out << "\n[ppo]\n";
    out << "total_timesteps = " << c.ppo.total_timesteps << "\n";
    out << "rollout_length = " << c.ppo.rollout_length << "\n";
    out << "minibatch_size = " << c.ppo.minibatch_size << "\n";
    out << "epochs_per_update = " << c.ppo.epochs_per_update << "\n";
    out << "gamma = " << num(c.ppo.gamma) << "\ngae_lambda = " << num(c.ppo.gae_lambda) << "\n";
    out << "clip_eps = " << num(c.ppo.clip_eps) << "\n";
    out << "value_coeff = " << num(c.ppo.value_coeff) << "\n";
    out << "entropy_coeff = " << num(c.ppo.entropy_coeff) << "\n";
    out << "max_grad_norm = " << num(c.ppo.max_grad_norm) << "\n";
    out << "n_envs = " << c.ppo.n_envs << "\n";

    out << "\n[sweep]\n";
    out << "kind = " << to_string(c.sweep.kind) << "\n";
    out << "mu_min = " << num(c.sweep.mu_min) << "\nmu_max = " << num(c.sweep.mu_max)
        << "\nmu_step = " << num(c.sweep.mu_step) << "\n";
    out << "sigma_min = " << num(c.sweep.sigma_min) << "\nsigma_max = " << num(c.sweep.sigma_max)
        << "\nsigma_step = " << num(c.sweep.sigma_step) << "\n";
    out << "episodes_per_cell = " << c.sweep.episodes_per_cell << "\n";
    out << "denoisers = ";
    for (std::size_t i = 0; i < c.sweep.denoisers.size(); ++i) {
        out << (i ? "," : "") << to_string(c.sweep.denoisers[i]);
    }
    out << "\n";
    out << "seed = " << c.sweep.seed << "\n";
    return out.str();
}

void save_config(const RunConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << config_to_text(config);
}

}  // namespace uavnav
