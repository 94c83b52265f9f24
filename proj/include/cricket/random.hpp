#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cricket {

using Rng = std::mt19937_64;

/// Stable 64-bit FNV-1a hash; used for labels and manifests, never std::hash.
constexpr std::uint64_t fnv1a(std::string_view text,
                              std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

/// Derives an independent stream seed from a master seed, a label and an index.
/// Every stochastic component asks for its own labelled stream so results do not
/// depend on execution order or thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t index = 0) {
  const std::uint64_t h = fnv1a(label);
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline Rng make_rng(std::uint64_t master, std::string_view label, std::uint64_t index = 0) {
  return Rng(derive_seed(master, label, index));
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace cricket
