#ifndef BDGM_RNG_HPP
#define BDGM_RNG_HPP

#include <cstdint>
#include <random>

#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace bdgm {

// The engine is fully specified by the standard; the distributions in <random>
// are not, so draws go through Boost to keep seeded runs portable.
using Rng = std::mt19937_64;

inline double standard_normal(Rng& rng) {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

inline double uniform01(Rng& rng) {
  boost::random::uniform_01<double> dist;
  return dist(rng);
}

inline double chi_squared(Rng& rng, double df) {
  boost::random::chi_squared_distribution<double> dist(df);
  return dist(rng);
}

inline double exponential(Rng& rng, double rate) {
  boost::random::exponential_distribution<double> dist(rate);
  return dist(rng);
}

/// Uniform integer in [lo, hi].
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  boost::random::uniform_int_distribution<std::int64_t> dist(lo, hi);
  return dist(rng);
}

/// SplitMix64 finalizer; derives independent stream seeds from one base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace bdgm

#endif  // BDGM_RNG_HPP
