#pragma once

#include <cstdint>

namespace rdnn {

// Counter-based splitmix64 stream.  State advances by a fixed odd increment,
// so the k-th draw is a pure function of (seed, k): reproducible across
// platforms and immune to consumption-order drift between call sites.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

  private:
    std::uint64_t state_;
};

// Derives an independent stream seed from (base_seed, subdomain, role) by
// hashing the triple through one splitmix diffusion round per component.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t subdomain,
                                 std::uint64_t role) {
    SplitMix64 mix(base_seed ^ 0xA5A5A5A55A5A5A5AULL);
    std::uint64_t h = mix.next_u64();
    h ^= subdomain + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    SplitMix64 mix2(h);
    h = mix2.next_u64();
    h ^= role + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    SplitMix64 mix3(h);
    return mix3.next_u64();
}

// Stream roles, kept stable because sampled data depends on them.
enum class SeedRole : std::uint64_t {
    Interior = 1,
    Boundary = 2,
    Initial = 3,
    IcFit = 4,
    NetInit = 5,
    IcNetInit = 6,
};

inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t subdomain,
                                 SeedRole role) {
    return derive_seed(base_seed, subdomain, static_cast<std::uint64_t>(role));
}

}  // namespace rdnn
