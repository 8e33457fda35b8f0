#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace phishdqn {

/// Deterministic 64-bit generator used for every seeded operation in the
/// library (weight init, shuffles, epsilon-greedy draws, minibatch sampling).
///
/// The algorithm is SplitMix64 (Steele, Lea & Flood): state advances by the
/// constant 0x9E3779B97F4A7C15 and the output is mixed with two xor-shift
/// multiplies (0xBF58476D1CE4E5B9, 0x94D049BB133111EB). The full update is
/// spelled out here so splits and training runs can be reproduced by any
/// implementation, not just this binary.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1): the top 53 bits scaled by 2^-53.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Unbiased: draws are masked to the next
    /// power of two and rejected until one lands below n.
    std::uint64_t bounded(std::uint64_t n) {
        if (n <= 1) return 0;
        std::uint64_t mask = n - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        std::uint64_t x;
        do {
            x = next_u64() & mask;
        } while (x >= n);
        return x;
    }

    /// Fisher-Yates shuffle, iterating from the back.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    std::uint64_t state_;
};

}  // namespace phishdqn
