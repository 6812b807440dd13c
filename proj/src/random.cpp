#include "daa/random.hpp"

namespace daa {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t k0 = splitmix64(seed);
  const std::uint64_t k1 = splitmix64(k0 ^ a);
  const std::uint64_t k2 = splitmix64(k1 ^ splitmix64(b));
  std::seed_seq seq{static_cast<std::uint32_t>(k2), static_cast<std::uint32_t>(k2 >> 32),
                    static_cast<std::uint32_t>(k1), static_cast<std::uint32_t>(k1 >> 32)};
  return Rng(seq);
}

}  // namespace daa
