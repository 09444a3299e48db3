#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace atlas {

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic, platform-independent RNG. splitmix64 core; good enough for
// seeding, shuffles and SGD sampling. Never use std::uniform_* here, their
// output is not pinned by the standard.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless mix of several words into one; used to derive per-item seeds
// (per replicate, per edge, per epoch) from a master seed.
inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b = 0x9e3779b97f4a7c15ULL,
                              std::uint64_t c = 0, std::uint64_t d = 0) {
    std::uint64_t s = a;
    std::uint64_t h = splitmix64(s);
    s ^= b;  h ^= splitmix64(s);
    s ^= c;  h ^= splitmix64(s);
    s ^= d;  h ^= splitmix64(s);
    return h;
}

class rng64 {
public:
    explicit rng64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64(state_); }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, bound)
    std::uint64_t next_below(std::uint64_t bound) {
        return bound ? next() % bound : 0;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    return fnv1a64(s.data(), s.size());
}

}  // namespace atlas
