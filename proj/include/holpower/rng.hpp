#pragma once

#include <cstdint>
#include <random>

namespace holpower {

/// One step of the SplitMix64 generator; used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) built from the top 53 bits of one engine output.
/// Bit-reproducible across platforms, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Named randomness streams for one simulated trajectory. Each stream is
/// advanced a fixed number of times per time slot, so swapping the policy
/// kind cannot shift the channel or interference sample paths.
struct SimStreams {
  std::mt19937_64 channel;  ///< success/failure draws
  std::mt19937_64 chain;    ///< interference transitions and stationary start
  std::mt19937_64 policy;   ///< randomized controllers (avg, slbpc2)
  std::mt19937_64 arrival;  ///< Bernoulli arrivals
};

/// Seed splitting: replication r seeds its four engines with the first four
/// SplitMix64 outputs of the state (base_seed XOR r).
inline SimStreams make_streams(std::uint64_t base_seed, std::uint64_t replication) {
  std::uint64_t s = base_seed ^ replication;
  SimStreams st;
  st.channel.seed(splitmix64(s));
  st.chain.seed(splitmix64(s));
  st.policy.seed(splitmix64(s));
  st.arrival.seed(splitmix64(s));
  return st;
}

}  // namespace holpower
