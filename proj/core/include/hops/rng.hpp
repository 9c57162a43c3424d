#pragma once

#include <cstdint>

namespace hops {

/// splitmix64 generator. The workbench promises bit-identical streams for a
/// given seed across platforms and worker counts; std::mt19937 plus the
/// standard distributions cannot carry that promise (distribution algorithms
/// are implementation-defined), so the whole sampling path is kept in-house.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  /// Independent generator for (master seed, stream index). Used to give
  /// every sample (or every detector shot) its own stream, which makes
  /// generation order-independent and safe to parallelize.
  static SplitMix64 substream(std::uint64_t master_seed,
                              std::uint64_t stream_index);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53-bit resolution.
  double next_unit();

  /// Uniform double in [0, 2*pi).
  double next_phase();

 private:
  std::uint64_t state_;
};

/// Uniform draw on [lo, hi).
double uniform_draw(SplitMix64& gen, double lo, double hi);

/// Rayleigh draw by inverse transform, scale > 0.
double rayleigh_draw(SplitMix64& gen, double scale);

/// Poisson draw by Knuth's product method. Means above 30 are peeled off in
/// chunks (sums of independent Poisson variates are Poisson), which avoids
/// exp(-mean) underflowing for bright fields.
std::uint64_t poisson_draw(SplitMix64& gen, double mean);

}  // namespace hops
