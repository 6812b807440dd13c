#pragma once

#include <cstdint>
#include <random>

namespace daa {

using Rng = std::mt19937_64;

// Stream tags for the first key of make_stream.
inline constexpr std::uint64_t kInitStream = 0x696e6974ULL;
inline constexpr std::uint64_t kPredictStream = 0x70726564ULL;
inline constexpr std::uint64_t kSampleStream = 0x73616d70ULL;

std::uint64_t splitmix64(std::uint64_t x);

// Independent, reproducible generator keyed by (seed, a, b). Worker streams
// are derived from (seed, kSampleStream + outer iteration, worker id), so a
// run is a pure function of the seed and the worker layout.
Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

inline double uniform01(Rng& rng) {
  // 53 random bits -> [0, 1)
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace daa
