#include "varcvar/rng.hpp"

namespace varcvar {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng Rng::stream(std::uint64_t master, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

double Rng::uniform() {
  // 53 random bits mapped to the centre of each dyadic cell: never 0 or 1.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace varcvar
