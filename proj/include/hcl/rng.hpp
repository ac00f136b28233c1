#pragma once

#include <cstdint>

// Counter-based random streams.  Every value is a pure function of
// (seed, counter), so fields regenerate bit-exactly from their seed and
// independent realizations can be evaluated in any order.

namespace hcl {

namespace detail {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// k-th value of the splitmix64 stream with the given seed.
inline std::uint64_t stream_value(std::uint64_t seed, std::uint64_t k) {
  return detail::mix64(seed + (k + 1) * detail::kGamma);
}

// Seed of the r-th child stream (one per disorder realization).
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t r) {
  return detail::mix64(root ^ stream_value(root, r));
}

// Map 64 random bits to a double in [0, 1), using the top 53 bits.
inline double to_unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace hcl
