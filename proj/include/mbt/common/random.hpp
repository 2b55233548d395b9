#ifndef MBT_COMMON_RANDOM_HPP_
#define MBT_COMMON_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <string>

namespace mbt {

using Rng = std::mt19937_64;

inline double UniformReal(Rng& rng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

inline int UniformInt(Rng& rng, int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  return dist(rng);
}

inline bool Bernoulli(Rng& rng, double p) {
  std::bernoulli_distribution dist(p);
  return dist(rng);
}

// Stateless normal draw; no cached second sample survives between calls,
// so the engine state alone determines the stream.
inline double Normal(Rng& rng, double mean, double stddev) {
  if (!(stddev > 0.0)) return mean;
  std::normal_distribution<double> dist(mean, stddev);
  return dist(rng);
}

// splitmix64-based mixing used to derive independent per-episode and
// per-robot seeds from a master seed.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0);

std::string SerializeRng(const Rng& rng);
Rng DeserializeRng(const std::string& text);

}  // namespace mbt

#endif  // MBT_COMMON_RANDOM_HPP_
