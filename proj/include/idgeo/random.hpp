#pragma once

// Seeded random streams. Every consumer derives its own generator from
// (seed, stream, purpose), so results do not depend on evaluation order.

#include <cstdint>
#include <random>

namespace idgeo {

namespace rng_purpose {
inline constexpr std::uint32_t kEnsembleRedraw = 1;
inline constexpr std::uint32_t kMultiStart = 2;
inline constexpr std::uint32_t kEnsembleReport = 3;
inline constexpr std::uint32_t kPairs = 10;
inline constexpr std::uint32_t kModels = 11;
inline constexpr std::uint32_t kPerturbation = 12;
inline constexpr std::uint32_t kKarcherPoints = 13;
} // namespace rng_purpose

inline std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream, std::uint32_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), purpose};
    return std::mt19937_64(seq);
}

/// splitmix64 finalizer over (seed, index); used for per-task solver seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace idgeo
