#pragma once

// Internal fixed-order reductions shared by the statistics paths. The
// accumulation order is part of the reproducibility contract: results must
// not depend on how samples were produced or batched, so everything is
// summed sequentially in chunks of kChunk.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace hops::detail {

inline constexpr std::size_t kChunk = 4096;

inline double chunked_sum(const std::vector<double>& values) {
  double total = 0.0;
  const std::size_t n = values.size();
  for (std::size_t base = 0; base < n; base += kChunk) {
    const std::size_t end = std::min(base + kChunk, n);
    double partial = 0.0;
    for (std::size_t i = base; i < end; ++i) partial += values[i];
    total += partial;
  }
  return total;
}

inline double mean_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return chunked_sum(values) / static_cast<double>(values.size());
}

/// Unbiased sample variance; 0 for fewer than two values.
inline double sample_variance(const std::vector<double>& values,
                              double mean) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double total = 0.0;
  for (std::size_t base = 0; base < n; base += kChunk) {
    const std::size_t end = std::min(base + kChunk, n);
    double partial = 0.0;
    for (std::size_t i = base; i < end; ++i) {
      const double d = values[i] - mean;
      partial += d * d;
    }
    total += partial;
  }
  return total / static_cast<double>(n - 1);
}

/// Standard error of the mean.
inline double std_error_of(const std::vector<double>& values, double mean) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  return std::sqrt(sample_variance(values, mean) / static_cast<double>(n));
}

struct CircularStats {
  double mean_angle = 0.0;  ///< argument of the resultant, in (-pi, pi]
  double variance = 0.0;    ///< 1 - |mean resultant|, in [0, 1]
};

inline CircularStats circular_stats(const std::vector<double>& angles) {
  std::vector<double> cs(angles.size()), sn(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    cs[i] = std::cos(angles[i]);
    sn[i] = std::sin(angles[i]);
  }
  const double c = mean_of(cs);
  const double s = mean_of(sn);
  CircularStats out;
  const double r = std::hypot(c, s);
  out.variance = std::max(0.0, 1.0 - r);
  out.mean_angle = (r == 0.0) ? 0.0 : std::atan2(s, c);
  return out;
}

}  // namespace hops::detail
