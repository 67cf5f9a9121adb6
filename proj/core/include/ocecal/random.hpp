#pragma once

// Portable random streams.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Standard <random> distributions are implementation-defined, so
// every variate below is derived from raw 64-bit words by a documented method:
//
//   uniform()        (word >> 11) * 2^-53                     in [0, 1)
//   open_uniform()   ((word >> 11) + 0.5) * 2^-53             in (0, 1)
//   uniform_index(n) rejection on the top bits (no modulo bias)
//   normal()         Marsaglia polar method, no cached second value
//   gamma(a)         Marsaglia-Tsang squeeze; a < 1 via gamma(a+1) * U^(1/a)
//   beta(a, b)       X / (X + Y) with X ~ gamma(a), Y ~ gamma(b)
//
// Independent substreams come from mix_seed(seed, index), a SplitMix64
// finalizer applied to seed + golden-ratio * (index + 1).

#include <cstdint>
#include <random>

namespace ocecal {

/// SplitMix64 output function.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for substream `index` of master seed `seed`.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double open_uniform();
  /// Uniform integer in [0, n); n >= 1.
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();
  double gamma(double shape);
  double beta(double a, double b);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ocecal
