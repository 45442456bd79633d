#pragma once

// Seed derivation for independent, reproducible random streams.
//
// Every random quantity in the simulator is drawn from a std::mt19937_64
// whose seed is derived from a master seed plus a tuple of integer keys.
// Two streams with different key tuples are statistically independent, and
// adding a new stream never perturbs an existing one.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace offload {

using Rng = std::mt19937_64;

/// Purpose tags for derived streams.
enum class Stream : std::uint64_t {
  kTopology = 0x746f706f,
  kLinkRates = 0x72617465,
  kTasks = 0x7461736b,
  kArrivals = 0x61727276,
  kFading = 0x66616465,
  kPolicy = 0x706f6c69,
  kNetwork = 0x6e657477,
  kTraffic = 0x74726166,
  kSimulation = 0x73696d75,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, Stream tag,
                                 std::initializer_list<std::uint64_t> keys = {}) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(tag)));
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t seed, Stream tag,
                    std::initializer_list<std::uint64_t> keys = {}) {
  return Rng(derive_seed(seed, tag, keys));
}

}  // namespace offload
