#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace uavnav {

// Seed derivation. Every randomness consumer (environment generation, policy
// sampling, measurement noise, minibatch shuffling, ...) owns a stream whose
// seed is derived from the master seed plus a name and optional index, so
// ablating one source never shifts the draws of another.
uint64_t mix_seed(uint64_t a, uint64_t b);
uint64_t derive_seed(uint64_t master, std::string_view stream_name);
uint64_t derive_seed(uint64_t master, std::string_view stream_name, uint64_t index);

// Deterministic random stream. The uniform/normal transforms are implemented
// here rather than with std:: distributions so that sequences are identical
// across standard libraries, not just within one build.
class RngStream {
   public:
    explicit RngStream(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Inclusive on both ends.
    int uniform_int(int lo, int hi) {
        const auto span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    // Standard normal via Box-Muller; consumes exactly two engine draws.
    double normal() {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;        // [0, 1)
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643 * u2);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

   private:
    std::mt19937_64 engine_;
};

}  // namespace uavnav
