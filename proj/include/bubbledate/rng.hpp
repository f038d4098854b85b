#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bubbledate {

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream key from a seed and a path of coordinates,
/// e.g. {replication, stream id}. Order matters.
[[nodiscard]] constexpr std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t c : path) h = mix64(h ^ mix64(c + 0x632BE59BD9B4E019ULL));
    return h;
}

/// Gaussian draws from a keyed stream. Each (seed, path) gives the same
/// sequence no matter which thread or in what order it is consumed.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t key) : engine_(key) {}
    GaussianStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) : engine_(stream_key(seed, path)) {}

    double operator()() { return normal_(engine_); }
    double operator()(double sd) { return sd * normal_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Stream ids used across the library so that no two consumers share draws.
namespace streams {
inline constexpr std::uint64_t kErrors = 1;
inline constexpr std::uint64_t kBrownian1 = 11;
inline constexpr std::uint64_t kBrownian2 = 12;
inline constexpr std::uint64_t kLevel = 13;
}  // namespace streams

}  // namespace bubbledate
