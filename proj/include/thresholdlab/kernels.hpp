#pragma once

/// @file kernels.hpp
/// Data-parallel inner loops. Every OpenMP kernel has a serial reference
/// twin with the same signature; tests pin the two against each other and
/// bench/ times them. Parallel results are bit-identical to the serial
/// ones: integer reductions, and per-row work with no cross-row sums.

#include <cstdint>
#include <span>
#include <vector>

#include "thresholdlab/structures.hpp"

namespace thresholdlab::kernels {

/// Membership of all 2^n configurations, indexed by mask.
/// Requires ground_size(expr) <= kExhaustiveCap.
std::vector<std::uint8_t> enumerate_members_serial(const StructureExpr& expr);
std::vector<std::uint8_t> enumerate_members_parallel(const StructureExpr& expr);

/// N_i = number of members with exactly i ones, i = 0..n.
std::vector<std::uint64_t> count_by_weight_serial(const StructureExpr& expr);
std::vector<std::uint64_t> count_by_weight_parallel(const StructureExpr& expr);

struct CurvePoint {
  double p;
  double mu;
  double dmu_dp;  // NaN at p = 0 and p = 1
};

/// Availability and derivative at `points` evenly spaced p values on [0,1]
/// (endpoints included). Requires points >= 2.
std::vector<CurvePoint> curve_serial(const StructureExpr& expr, int points);
std::vector<CurvePoint> curve_parallel(const StructureExpr& expr, int points);

/// Monte Carlo batch layout: batch b draws `batch_size` configurations from
/// its own generator stream keyed by (seed, b).
struct BatchPlan {
  std::uint64_t seed;
  std::uint64_t first_batch;
  std::uint64_t num_batches;
  std::uint64_t batch_size;
};

/// Number of sampled configurations that are members of the failure set.
std::uint64_t mc_count_serial(const StructureExpr& expr, double p,
                              const BatchPlan& plan);
std::uint64_t mc_count_parallel(const StructureExpr& expr, double p,
                                const BatchPlan& plan);

/// Count of members in one batch; exposed for the stream-independence tests.
std::uint64_t mc_count_batch(const StructureExpr& expr, double p,
                             std::uint64_t seed, std::uint64_t batch,
                             std::uint64_t batch_size);

}  // namespace thresholdlab::kernels
