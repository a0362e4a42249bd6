#pragma once

#include <cstdint>
#include <cmath>
#include <cstddef>
#include <vector>

namespace amemnet {

// Portable seeded generator: xoshiro256** seeded through splitmix64.
// All output sequences depend only on the 64-bit seed, not on the
// platform's standard library, so artifacts are bit-reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
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

    // Uniform double in [0, 1) using the top 53 bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Standard normal via Box-Muller; second variate cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Fisher-Yates; avoids std::shuffle so order is pinned across platforms.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    // Stream splitting: child seed = splitmix64(base ^ tag * golden ratio).
    static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
        std::uint64_t s = base ^ (tag * 0x9E3779B97F4A7C15ULL);
        return splitmix64(s);
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& state) {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace amemnet
