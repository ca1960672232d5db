#include "uavnav/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace uavnav {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint blob assumes a little-endian host");

constexpr const char* kMagic = "UAVNAV-CHECKPOINT-V1";

std::string fmt_sizes(const std::vector<int>& sizes) {
    std::ostringstream os;
    for (std::size_t i = 0; i < sizes.size(); ++i) os << (i ? " " : "") << sizes[i];
    return os.str();
}

std::vector<int> parse_sizes(std::istringstream& is) {
    std::vector<int> sizes;
    int v;
    while (is >> v) sizes.push_back(v);
    if (sizes.size() < 2) throw std::runtime_error("checkpoint: bad layer sizes");
    return sizes;
}

std::string expect_line(std::istream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("checkpoint: truncated header");
    if (line.rfind(key + " ", 0) != 0) {
        throw std::runtime_error("checkpoint: expected '" + key + "' line");
    }
    return line.substr(key.size() + 1);
}

}  // namespace

void save_checkpoint(const std::string& path, const ActorCritic& agent) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);

    char buf[64];
    out << kMagic << "\n";
    out << "actor_sizes " << fmt_sizes(agent.actor.sizes) << "\n";
    out << "actor_head " << to_string(agent.actor.head) << "\n";
    out << "critic_sizes " << fmt_sizes(agent.critic.sizes) << "\n";
    out << "critic_head " << to_string(agent.critic.head) << "\n";
    out << "log_std";
    for (const float v : agent.log_std) {
        std::snprintf(buf, sizeof(buf), " %.9g", static_cast<double>(v));
        out << buf;
    }
    out << "\n";
    const std::size_t count = agent.actor.params.size() + agent.critic.params.size();
    out << "param_count " << count << "\n";
    out << "data\n";
    out.write(reinterpret_cast<const char*>(agent.actor.params.data()),
              static_cast<std::streamsize>(agent.actor.params.size() * sizeof(float)));
    out.write(reinterpret_cast<const char*>(agent.critic.params.data()),
              static_cast<std::streamsize>(agent.critic.params.size() * sizeof(float)));
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

ActorCritic load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint not found: " + path);

    std::string line;
    if (!std::getline(in, line) || line != kMagic) {
        throw std::runtime_error("not a checkpoint file: " + path);
    }

    ActorCritic agent;
    {
        std::istringstream is(expect_line(in, "actor_sizes"));
        agent.actor.sizes = parse_sizes(is);
    }
    agent.actor.head = parse_head_activation(expect_line(in, "actor_head"));
    {
        std::istringstream is(expect_line(in, "critic_sizes"));
        agent.critic.sizes = parse_sizes(is);
    }
    agent.critic.head = parse_head_activation(expect_line(in, "critic_head"));
    {
        std::istringstream is(expect_line(in, "log_std"));
        for (float& v : agent.log_std) {
            if (!(is >> v)) throw std::runtime_error("checkpoint: bad log_std line");
        }
    }
    std::size_t count = 0;
    {
        std::istringstream is(expect_line(in, "param_count"));
        if (!(is >> count)) throw std::runtime_error("checkpoint: bad param_count line");
    }
    if (!std::getline(in, line) || line != "data") {
        throw std::runtime_error("checkpoint: missing data section");
    }

    const std::size_t n_actor = agent.actor.param_count();
    const std::size_t n_critic = agent.critic.param_count();
    if (count != n_actor + n_critic) {
        throw std::runtime_error("checkpoint: parameter count does not match layer sizes");
    }
    if (agent.actor.in_dim() != kObsDim || agent.actor.out_dim() != kActionDim ||
        agent.critic.in_dim() != kObsDim || agent.critic.out_dim() != 1) {
        throw std::runtime_error("checkpoint: network shape mismatch");
    }

    agent.actor.params.resize(n_actor);
    agent.critic.params.resize(n_critic);
    in.read(reinterpret_cast<char*>(agent.actor.params.data()),
            static_cast<std::streamsize>(n_actor * sizeof(float)));
    in.read(reinterpret_cast<char*>(agent.critic.params.data()),
            static_cast<std::streamsize>(n_critic * sizeof(float)));
    if (!in) throw std::runtime_error("checkpoint: truncated parameter blob");
    return agent;
}

}  // namespace uavnav
