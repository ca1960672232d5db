#include "uavnav/rng.hpp"

namespace uavnav {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

uint64_t mix_seed(uint64_t a, uint64_t b) { return splitmix64(splitmix64(a) ^ b); }

uint64_t derive_seed(uint64_t master, std::string_view stream_name) {
    return mix_seed(master, fnv1a(stream_name));
}

uint64_t derive_seed(uint64_t master, std::string_view stream_name, uint64_t index) {
    return mix_seed(derive_seed(master, stream_name), splitmix64(index));
}

}  // namespace uavnav
