#pragma once

#include <cstdint>
#include <limits>

namespace otac {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-addressable random stream.
///
/// Every Monte-Carlo trial owns a stream derived from (seed, index), so the
/// numbers a trial sees do not depend on how trials are spread over workers.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

    constexpr CounterRng(std::uint64_t seed, std::uint64_t index) noexcept
        : state_(mix64(mix64(seed) ^ (index * golden + golden))) {}

    constexpr explicit CounterRng(std::uint64_t seed) noexcept : CounterRng(seed, 0) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += golden;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

/// Uniform double on the open interval (0, 1): 52 random bits, offset by half a step.
template <class Rng>
double uniform_open01(Rng& rng) {
    constexpr double scale = 1.0 / 4503599627370496.0; // 2^-52
    return (static_cast<double>(rng() >> 12) + 0.5) * scale;
}

/// Unbiased integer in [0, n) (Lemire's multiply-and-reject).
template <class Rng>
std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    using u128 = unsigned __int128;
    u128 m = static_cast<u128>(rng()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<u128>(rng()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

} // namespace otac
