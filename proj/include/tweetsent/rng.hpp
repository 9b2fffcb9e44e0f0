#pragma once

#include <cstdint>
#include <vector>

namespace tweetsent {

// Deterministic 64-bit generators used everywhere a shuffle or random draw
// is needed. Both are the public-domain reference algorithms
// (splitmix64 for seeding, xoshiro256** for the stream), so any other
// implementation of the same algorithms reproduces our sequences exactly.
// First outputs from seed 0: splitmix64 -> 0xE220A8397B1DCDAF,
// xoshiro256** -> 0x99EC5F36CB75F2B4.

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

class Xoshiro256ss {
  public:
    explicit Xoshiro256ss(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : state_) word = sm.next();
    }

    std::uint64_t next() {
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

    // Uniform draw in [0, bound) by modulo reduction. The slight modulo
    // bias is irrelevant at our corpus sizes and keeps the algorithm
    // one line, which matters for cross-implementation reproducibility.
    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

    // Uniform double in [0, 1) with 53 bits of randomness.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

// In-place Fisher-Yates, high index down, j = next_below(i + 1).
template <typename T>
void shuffle(std::vector<T>& items, Xoshiro256ss& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Xoshiro256ss rng(seed);
    shuffle(idx, rng);
    return idx;
}

}  // namespace tweetsent
