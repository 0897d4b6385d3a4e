#pragma once

#include <cmath>
#include <cstdint>

namespace mlmc {

// splitmix64 finalizer; used for seed mixing and stream derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive an independent 64-bit seed from a base seed and a salt (e.g. a
// study repetition index). Counter-based: no generator state is shared.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    return mix64(base ^ mix64(salt));
}

// xoshiro256** with the state derived from (seed, hi, lo) counters.
// A stream is fully determined by its three constructor arguments, so
// per-(level, sample) streams can be created in any order on any thread.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t hi, std::uint64_t lo) {
        std::uint64_t h = mix64(seed);
        h = mix64(h ^ hi);
        h = mix64(h ^ lo);
        for (auto& w : state_) {
            h += 0x9e3779b97f4a7c15ULL;
            w = mix64(h);
        }
        state_[0] |= 1ULL;  // never all-zero
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1); safe to pass to log().
    double u01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential() { return -std::log(u01()); }

    // Standard normal via Box-Muller; the spare is cached per stream.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(u01()));
        const double phi = 6.283185307179586476925286766559 * u01();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    // Uniform index in {0, ..., n-1}.
    std::size_t index(std::size_t n) {
        const std::size_t i = static_cast<std::size_t>(u01() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mlmc
