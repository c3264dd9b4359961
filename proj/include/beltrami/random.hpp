#pragma once

#include <cstdint>
#include <random>

namespace beltrami {

/// splitmix64 finaliser.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of draw `index` in stream `stream` derived from the run seed. Streams
/// name independent consumers (helicity samples, shears, flows, ...), so
/// adding draws to one stream never shifts another.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ splitmix64(stream)) + index);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return std::mt19937_64(split_seed(seed, stream, index));
}

namespace stream {
constexpr std::uint64_t kEigensolver = 1;
constexpr std::uint64_t kHelicitySamples = 2;
constexpr std::uint64_t kShears = 3;
constexpr std::uint64_t kFlows = 4;
constexpr std::uint64_t kMetrics = 5;
constexpr std::uint64_t kHarmonic = 6;
}  // namespace stream

}  // namespace beltrami
