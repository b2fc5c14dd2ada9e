#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace projcred {

using Rng = std::mt19937_64;

// Identifies what a random stream is used for. Part of the stream key, so
// e.g. frequentist replicate 7 and posterior realization 7 never share draws.
enum class StreamKind : std::uint64_t {
    design = 1,
    frequentist_data = 2,
    posterior_data = 3,
    posterior_draws = 4,
    gaussian_limit = 5,
    moments = 6,
    selfcheck = 7,
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives the seed of an independent stream from (master seed, kind, a, b).
// The result depends only on the key, never on scheduling, which is what
// makes parallel runs reproduce serial ones bit for bit.
constexpr std::uint64_t stream_seed(std::uint64_t master, StreamKind kind,
                                    std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ static_cast<std::uint64_t>(kind));
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    return h;
}

inline Rng make_stream(std::uint64_t master, StreamKind kind, std::uint64_t a = 0,
                       std::uint64_t b = 0) {
    return Rng(stream_seed(master, kind, a, b));
}

}  // namespace projcred
