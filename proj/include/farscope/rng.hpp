#pragma once

#include <cstdint>

namespace farscope {

// Reproducible generators for the noise model. The algorithm is part of the
// data-format contract: noisy matrices regenerated from the same seed must be
// bitwise identical on every platform, so we pin xoshiro256++ seeded through
// splitmix64 instead of the (implementation-defined) <random> engines.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0,1) with 53 random mantissa bits
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform on [-1,1]
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }
    std::uint64_t s_[4]{};
};

// Child seed for the idx-th noise draw of a run, so every delta in a delta
// list gets its own stream while the whole run stays a function of one seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t idx) {
    std::uint64_t state = master ^ (0x9e3779b97f4a7c15ULL * (idx + 1));
    return splitmix64(state);
}

} // namespace farscope
