#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace linksched {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic child seed of `base` along a path of tags. Streams derived
// with different tag paths are treated as independent.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t s = mix64(base);
  for (auto t : tags) s = mix64(s ^ mix64(t + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

// Stream tags, so call sites read as intent rather than magic numbers.
namespace stream {
inline constexpr std::uint64_t kGraph = 1;
inline constexpr std::uint64_t kRates = 2;
inline constexpr std::uint64_t kArrivals = 3;
inline constexpr std::uint64_t kParams = 4;
inline constexpr std::uint64_t kPerturb = 5;
inline constexpr std::uint64_t kBatch = 6;
inline constexpr std::uint64_t kValidation = 7;
inline constexpr std::uint64_t kBootstrap = 8;
inline constexpr std::uint64_t kTraffic = 9;
}  // namespace stream

}  // namespace linksched
