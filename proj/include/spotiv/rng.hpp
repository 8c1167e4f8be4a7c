#pragma once

#include <cstdint>
#include <random>

namespace spotiv {

/// Purpose of a random stream. Streams with different roles never share a
/// seed, whatever the (seed, index) pair.
enum class StreamRole : std::uint64_t {
  Data = 1,
  Bootstrap = 2,
  Oracle = 3,
  Replication = 4,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `index` of `role` under the master `seed`.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index,
                                    StreamRole role) noexcept {
  return mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(role)) + index);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t index, StreamRole role) {
  return Rng(stream_seed(seed, index, role));
}

}  // namespace spotiv
