#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>

namespace sandpile {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed of the stream for `index`: the index-th output of a SplitMix64
/// generator started at `master_seed`. Independent of scheduling order.
constexpr std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
    return splitmix64(master_seed + index * 0x9E3779B97F4A7C15ull);
}

inline constexpr std::string_view kSeedRule = "mt19937_64(splitmix64(master_seed + trial_index * 0x9E3779B97F4A7C15))";

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(stream_seed(master_seed, index));
}

/// Bernoulli(q) draw from one 64-bit engine output: true iff the output is
/// below q * 2^64. Platform independent, unlike std::bernoulli_distribution.
class Bernoulli {
public:
    explicit Bernoulli(double q) {
        if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("Bernoulli parameter must lie in [0, 1]");
        always_ = q == 1.0;
        threshold_ = always_ ? 0 : static_cast<std::uint64_t>(std::ldexp(q, 64));
    }

    bool operator()(Rng& rng) const { return always_ || rng() < threshold_; }

private:
    std::uint64_t threshold_ = 0;
    bool always_ = false;
};

}  // namespace sandpile
