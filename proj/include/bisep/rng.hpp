#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace bisep {

// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive hash of a sequence of 64-bit words.
std::uint64_t hash_words(std::span<const std::uint64_t> words);
inline std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) {
  return hash_words(std::span<const std::uint64_t>(words.begin(), words.size()));
}

/// Bit pattern of a double, with -0.0 folded onto +0.0.
std::uint64_t double_bits(double x);

/// Seed for the stream identified by (seed, index).
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t index) {
  return Engine(stream_seed(seed, index));
}

/// Uniform k-subset of {0, ..., n-1}, sorted ascending.
std::vector<std::ptrdiff_t> random_subset(std::ptrdiff_t n, std::ptrdiff_t k,
                                          Engine& eng);

}  // namespace bisep
