#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nzfit {

// Named sub-stream of the single run seed. seed_seq and mt19937_64 are fully
// specified by the standard, so the stream is identical on every platform.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::string_view name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

// Uniform integer in [0, n) by rejection; the std distributions are not
// portable across library implementations.
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
  const std::uint64_t limit = (~std::uint64_t(0)) - (~std::uint64_t(0)) % n;
  std::uint64_t r;
  do r = g(); while (r >= limit);
  return r % n;
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

}  // namespace nzfit
