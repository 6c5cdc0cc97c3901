#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

namespace dmap {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic child seed from a base seed and a sequence of integers.
/// Order of `parts` matters; callers sort sets before deriving.
inline std::uint64_t derive_seed(std::uint64_t base, std::span<const std::int64_t> parts) {
  std::uint64_t h = splitmix64(base);
  for (std::int64_t p : parts) h = splitmix64(h ^ static_cast<std::uint64_t>(p));
  return splitmix64(h ^ static_cast<std::uint64_t>(parts.size()));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::int64_t> parts) {
  return derive_seed(base, std::span<const std::int64_t>(parts.begin(), parts.size()));
}

}  // namespace dmap
