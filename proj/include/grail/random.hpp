#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace grail {

// 64-bit Mersenne twister. Sampling helpers below are written out by hand so
// that streams are identical across standard library implementations.
using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// seed(master, stream) = mix64(mix64(master) ^ stream). Adding streams never
// perturbs existing ones.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(mix64(master) ^ stream);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// Uniform integer in [0, n), n >= 1, by rejection.
inline int uniform_index(Rng& rng, int n) {
  const auto range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<int>(x % range);
}

// Index of the maximum, ties broken uniformly at random.
int argmax_random_tie(std::span<const double> values, Rng& rng);

// Epsilon-greedy choice over `values`.
int epsilon_greedy(std::span<const double> values, double epsilon, Rng& rng);

}  // namespace grail
