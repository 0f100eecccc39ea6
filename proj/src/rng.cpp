#include "bisep/rng.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace bisep {

std::uint64_t hash_words(std::span<const std::uint64_t> words) {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

std::uint64_t double_bits(double x) {
  if (x == 0.0) x = 0.0;
  return std::bit_cast<std::uint64_t>(x);
}

std::vector<std::ptrdiff_t> random_subset(std::ptrdiff_t n, std::ptrdiff_t k,
                                          Engine& eng) {
  if (k < 0 || k > n) throw std::invalid_argument("random_subset: need 0 <= k <= n");
  std::vector<std::ptrdiff_t> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), std::ptrdiff_t{0});
  // Partial Fisher-Yates: the first k slots become a uniform k-subset.
  for (std::ptrdiff_t j = 0; j < k; ++j) {
    std::uniform_int_distribution<std::ptrdiff_t> pick(j, n - 1);
    std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick(eng))]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace bisep
