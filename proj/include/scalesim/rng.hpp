#pragma once

#include <cstdint>

namespace scalesim {

/// splitmix64 step; used to derive independent stream states.
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** generator. One instance per path, keyed by (seed, stream).
/// All derived variates are computed with portable arithmetic so a given
/// (seed, stream) produces the same numbers on every platform.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double normal();
  double exponential(double mean);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace scalesim
