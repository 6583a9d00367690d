#ifndef WONHAM_RNG_HPP
#define WONHAM_RNG_HPP

#include <cstdint>
#include <random>

namespace wonham {

// RNG contract: every random procedure takes a 64-bit seed and a stream
// tag. The chain realization, the observation noise, and the
// Brownian-bridge refinement noise draw from disjoint substreams of the
// same seed, so each source of randomness is independently reproducible.
enum class RngStream : std::uint64_t {
  chain = 0,
  noise = 1,
  bridge = 2,
};

namespace detail {
// splitmix64 finalizer; decorrelates (seed, stream, salt) triples.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

inline std::mt19937_64 make_rng(std::uint64_t seed, RngStream stream,
                                std::uint64_t salt = 0) {
  std::uint64_t s = detail::mix64(seed);
  s = detail::mix64(s ^ static_cast<std::uint64_t>(stream));
  s = detail::mix64(s ^ salt);
  return std::mt19937_64(s);
}

}  // namespace wonham

#endif
