#include "thresholdlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thresholdlab/errors.hpp"
#include "thresholdlab/kernels.hpp"

namespace thresholdlab {

namespace {

void check_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InputError("sampling probability must lie in [0,1], got " +
                     std::to_string(p));
  }
}

// Members among samples [0, total) of the stream keyed by seed.
std::uint64_t count_prefix(const StructureExpr& expr, double p,
                           std::uint64_t seed, std::uint64_t first_batch,
                           std::uint64_t total) {
  const std::uint64_t full = total / kMcBatchSize;
  const std::uint64_t rest = total % kMcBatchSize;
  std::uint64_t hits = kernels::mc_count_parallel(
      expr, p, {seed, first_batch, full, kMcBatchSize});
  if (rest > 0) {
    hits += kernels::mc_count_batch(expr, p, seed, first_batch + full, rest);
  }
  return hits;
}

McEstimate make_estimate(std::uint64_t successes, std::uint64_t samples,
                         std::uint64_t seed, bool cap_hit) {
  const auto ci = wilson_interval(successes, samples);
  const double p_hat =
      static_cast<double>(successes) / static_cast<double>(samples);
  return {p_hat, std::min(ci.lo, p_hat), std::max(ci.hi, p_hat), samples,
          successes, seed, cap_hit};
}

}  // namespace

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t samples,
                               double z) {
  if (samples == 0 || successes > samples) {
    throw InputError("Wilson interval needs 0 <= successes <= samples, samples > 0");
  }
  const double n = static_cast<double>(samples);
  const double ph = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (ph + z2 / (2.0 * n)) / denom;
  const double spread =
      z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
  // At 0 or n successes the matching bound is exact; rounding would leave ~1e-19.
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - spread);
  const double hi = successes == samples ? 1.0 : std::min(1.0, centre + spread);
  return {lo, hi};
}

McEstimate estimate_availability(const StructureExpr& expr, double p,
                                 std::uint64_t samples, std::uint64_t seed) {
  check_p(p);
  if (samples < kMcMinSamples) {
    throw InputError("Monte Carlo needs at least " +
                     std::to_string(kMcMinSamples) + " samples");
  }
  if (samples > kMcSampleCap) {
    throw InputError("Monte Carlo sample count above the cap of 1e8");
  }
  return make_estimate(count_prefix(expr, p, seed, 0, samples), samples, seed,
                       false);
}

McEstimate estimate_to_halfwidth(const StructureExpr& expr, double p,
                                 double halfwidth, std::uint64_t seed) {
  check_p(p);
  if (!(halfwidth > 0.0 && halfwidth < 0.5)) {
    throw InputError("halfwidth must lie in (0, 0.5)");
  }
  const double z2 = kWilsonZ95 * kWilsonZ95;
  std::uint64_t batches = 0;
  std::uint64_t hits = 0;
  std::uint64_t target = kMcBatchSize;  // pilot round
  const std::uint64_t cap_batches = kMcSampleCap / kMcBatchSize;
  while (true) {
    const std::uint64_t want =
        std::min((target + kMcBatchSize - 1) / kMcBatchSize, cap_batches);
    if (want > batches) {
      hits += kernels::mc_count_parallel(
          expr, p, {seed, batches, want - batches, kMcBatchSize});
      batches = want;
    }
    const std::uint64_t n = batches * kMcBatchSize;
    const auto ci = wilson_interval(hits, n);
    if (0.5 * (ci.hi - ci.lo) <= halfwidth) return make_estimate(hits, n, seed, false);
    if (batches >= cap_batches) return make_estimate(hits, n, seed, true);
    // Sample size predicted from the Wilson-adjusted proportion; always grow.
    const double pt = (static_cast<double>(hits) + 0.5 * z2) /
                      (static_cast<double>(n) + z2);
    const double predicted = z2 * pt * (1.0 - pt) / (halfwidth * halfwidth);
    const double capped = std::min(predicted, static_cast<double>(kMcSampleCap));
    target = std::max<std::uint64_t>(static_cast<std::uint64_t>(capped),
                                     n + n / 8 + kMcBatchSize);
  }
}

}  // namespace thresholdlab
