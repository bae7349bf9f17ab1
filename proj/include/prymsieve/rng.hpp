#pragma once

#include <array>
#include <cstdint>

namespace prymsieve {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// xoshiro256** seeded through splitmix64. Fully specified here, so sequences
/// are identical on every platform and toolchain; std:: distributions are
/// deliberately avoided for the same reason.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = detail::rotl64(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    /// Uniform integer in [0, n). Unbiased via rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::array<std::uint64_t, 4> state_{};
};

/// Derives an independent stream seed from (base seed, domain tag, index).
/// Used to key per-task generators so results never depend on worker count.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t domain, std::uint64_t index) {
    std::uint64_t s = base;
    s = detail::splitmix64(s) ^ (domain * 0x9e3779b97f4a7c15ULL);
    s = detail::splitmix64(s) ^ index;
    return detail::splitmix64(s);
}

namespace stream {
// Domain tags for derive_seed. Arbitrary distinct constants.
inline constexpr std::uint64_t walk = 0x77616c6bULL;        // "walk"
inline constexpr std::uint64_t factor = 0x666163ULL;        // "fac"
inline constexpr std::uint64_t census = 0x63656e73ULL;      // "cens"
inline constexpr std::uint64_t bootstrap = 0x626f6f74ULL;   // "boot"
inline constexpr std::uint64_t spectral = 0x73706563ULL;    // "spec"
}  // namespace stream

}  // namespace prymsieve
