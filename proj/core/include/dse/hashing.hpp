#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dse {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// 64-bit finalizer (murmur3 fmix64); a bijection on uint64.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

/// splitmix64 step; used to derive fixed seed sequences.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable (platform-independent) 64-bit string hash.
std::uint64_t hash64(std::string_view s, std::uint64_t seed = 0) noexcept;

}  // namespace dse
