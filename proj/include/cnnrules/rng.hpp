#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace cnnrules {

// PCG32 (XSH-RR). Identical (seed, stream) gives the identical sequence on
// every platform, which is what all shuffles, splits and initializers key on.
class Pcg32 {
public:
    static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;

    Pcg32() : Pcg32(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL >> 1) {}

    Pcg32(std::uint64_t seed, std::uint64_t stream) { reseed(seed, stream); }

    void reseed(std::uint64_t seed, std::uint64_t stream) {
        inc_ = (stream << 1u) | 1u;
        state_ = 0u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * kMultiplier + inc_;
        const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Uniform in [0, 1) from the top 24 bits: u / 2^24.
    float next_float() {
        return static_cast<float>(next_u32() >> 8) * (1.0f / 16777216.0f);
    }

    // Uniform in {0, ..., bound-1} via rejection sampling, bound >= 1.
    std::uint32_t next_bounded(std::uint32_t bound) {
        const std::uint32_t threshold = (0u - bound) % bound;
        for (;;) {
            const std::uint32_t r = next_u32();
            if (r >= threshold) return r % bound;
        }
    }

    std::uint64_t state() const { return state_; }
    std::uint64_t inc() const { return inc_; }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 0;
};

// One fixed stream per consumer so reruns of any stage see the same draws.
enum class RngStream : std::uint64_t {
    embeddings = 1,
    filters = 2,
    output = 3,
    shuffling = 4,
    splits = 5,
    logistic = 6,
};

inline Pcg32 make_rng(std::uint64_t seed, RngStream stream) {
    return Pcg32(seed, static_cast<std::uint64_t>(stream));
}

// Fisher-Yates, high index down.
template <typename T>
void shuffle(std::vector<T>& items, Pcg32& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::uint32_t j = rng.next_bounded(static_cast<std::uint32_t>(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace cnnrules
