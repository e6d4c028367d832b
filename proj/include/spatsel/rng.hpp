#pragma once

#include <cstdint>
#include <random>

namespace spatsel {

using Rng = std::mt19937_64;

// splitmix64 finalizer; stable way to derive independent streams from
// (seed, scenario, replicate) without coordinating the workers.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

inline Rng derive_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return Rng(mix64(mix64(mix64(seed) ^ a) ^ b));
}

inline double draw_uniform(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double draw_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline double draw_gamma(Rng& rng, double shape, double scale) {
  return std::gamma_distribution<double>(shape, scale)(rng);
}

// X ~ InverseGamma(shape, rate): density x^{-shape-1} exp(-rate/x).
inline double draw_inverse_gamma(Rng& rng, double shape, double rate) {
  return rate / std::gamma_distribution<double>(shape, 1.0)(rng);
}

inline double draw_exponential(Rng& rng) {
  return std::exponential_distribution<double>(1.0)(rng);
}

}  // namespace spatsel
