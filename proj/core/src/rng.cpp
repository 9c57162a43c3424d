#include "hops/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "hops/polarization.hpp"

namespace hops {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

SplitMix64 SplitMix64::substream(std::uint64_t master_seed,
                                 std::uint64_t stream_index) {
  // separate the index from the seed with one extra mixing round so that
  // (seed, i) and (seed + 1, i - 1) style collisions cannot line up
  return SplitMix64(mix64(master_seed) ^
                    mix64(stream_index * 0xD1B54A32D192ED03ull +
                          0x8BB84B93962EEFCDull));
}

std::uint64_t SplitMix64::next_u64() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_phase() {
  double p = two_pi * next_unit();
  // the product can round up to exactly 2*pi for the largest mantissas
  if (p >= two_pi) p = 0.0;
  return p;
}

double uniform_draw(SplitMix64& gen, double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("uniform_draw: need finite lo < hi");
  double v = lo + (hi - lo) * gen.next_unit();
  if (v >= hi) v = lo;
  return v;
}

double rayleigh_draw(SplitMix64& gen, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("rayleigh_draw: scale must be finite and > 0");
  // inverse transform; 1 - u lies in (0, 1], so the log never blows up
  return scale * std::sqrt(-2.0 * std::log(1.0 - gen.next_unit()));
}

namespace {

std::uint64_t poisson_knuth(SplitMix64& gen, double mean) {
  if (mean <= 0.0) return 0;
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double product = 1.0;
  do {
    ++k;
    product *= 1.0 - gen.next_unit();  // in (0, 1]
  } while (product > limit);
  return k - 1;
}

}  // namespace

std::uint64_t poisson_draw(SplitMix64& gen, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("poisson_draw: mean must be finite and >= 0");
  std::uint64_t total = 0;
  // peel off chunks so exp(-mean) stays well away from underflow
  while (mean > 30.0) {
    total += poisson_knuth(gen, 30.0);
    mean -= 30.0;
  }
  return total + poisson_knuth(gen, mean);
}

}  // namespace hops
