#pragma once

/// @file montecarlo.hpp
/// Sampling estimates of mu_p(A) with 95% Wilson score intervals.
/// Sampling is split into fixed-size batches, each with its own generator
/// stream keyed by (seed, batch index), so results do not depend on the
/// worker count.

#include <cstdint>

#include "thresholdlab/structures.hpp"

namespace thresholdlab {

inline constexpr std::uint64_t kMcBatchSize = 1024;
inline constexpr std::uint64_t kMcMinSamples = 100;
inline constexpr std::uint64_t kMcSampleCap = 100'000'000;
inline constexpr double kWilsonZ95 = 1.959963984540054;

struct McEstimate {
  double p_hat;
  double ci_lo;
  double ci_hi;
  std::uint64_t samples;
  std::uint64_t successes;
  std::uint64_t seed;
  bool cap_hit;
};

struct WilsonInterval {
  double lo;
  double hi;
};

/// Wilson score interval for `successes` out of `samples` (samples > 0).
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t samples,
                               double z = kWilsonZ95);

/// Draws `samples` (>= 100) configurations, each coordinate failed with
/// probability p independently.
McEstimate estimate_availability(const StructureExpr& expr, double p,
                                 std::uint64_t samples, std::uint64_t seed);

/// Keeps sampling until the interval half-width is at most `halfwidth`
/// (0 < halfwidth < 0.5) or kMcSampleCap samples have been drawn.
McEstimate estimate_to_halfwidth(const StructureExpr& expr, double p,
                                 double halfwidth, std::uint64_t seed);

}  // namespace thresholdlab
