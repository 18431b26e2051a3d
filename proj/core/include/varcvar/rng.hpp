#pragma once

#include <cstdint>
#include <random>

namespace varcvar {

// Random source owned by exactly one recursion. Streams for independent
// replications are derived from a master seed with `Rng::stream`.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Replication `index` of master seed `master`: a splitmix64 mix of the
  // pair, so neighbouring indices give unrelated engines.
  static Rng stream(std::uint64_t master, std::uint64_t index);

  double normal() { return normal_(engine_); }
  // Uniform on the open interval (0, 1).
  double uniform();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace varcvar
