#ifndef KFPCA_RNG_HPP
#define KFPCA_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace kfpca {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Purpose tags keep streams for different uses of the same run disjoint.
enum class StreamPurpose : std::uint64_t {
  scores = 1,
  noise = 2,
  bootstrap = 3,
  reference = 4,
  rate = 5,
};

/// Key derived from a master seed and a sequence of counters. Depends only on
/// its arguments, so streams can be created in any order.
inline std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) noexcept {
  std::uint64_t key = mix64(seed);
  for (std::uint64_t c : counters) key = mix64(key ^ mix64(c + 0x632be59bd9b4e019ULL));
  return key;
}

inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) {
  const std::uint64_t key = derive_key(seed, counters);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
  return Rng(seq);
}

}  // namespace kfpca

#endif  // KFPCA_RNG_HPP
