#include "thresholdlab/kernels.hpp"

#include <omp.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "thresholdlab/errors.hpp"
#include "thresholdlab/exact_eval.hpp"
#include "thresholdlab/parallel.hpp"

namespace thresholdlab::kernels {

namespace {

std::uint64_t checked_space(const StructureExpr& expr) {
  const std::int64_t n = expr.ground_size();
  if (n > kExhaustiveCap) {
    throw InputError("enumeration: ground size " + std::to_string(n) +
                     " exceeds the exhaustive cap " +
                     std::to_string(kExhaustiveCap));
  }
  return std::uint64_t{1} << n;
}

CurvePoint curve_point(const StructureExpr& expr, int i, int points) {
  const double p = static_cast<double>(i) / (points - 1);
  const double q = static_cast<double>(points - 1 - i) / (points - 1);
  const auto s = evaluate_with_slope(expr, Level{p, q});
  const bool endpoint = i == 0 || i == points - 1;
  return {p, s.value,
          endpoint ? std::numeric_limits<double>::quiet_NaN() : s.slope};
}

void check_points(int points) {
  if (points < 2) throw InputError("curve needs at least 2 grid points");
}

// 53-bit uniform in [0, 1).
inline double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::mt19937_64 batch_generator(std::uint64_t seed, std::uint64_t batch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(batch),
                    static_cast<std::uint32_t>(batch >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

std::vector<std::uint8_t> enumerate_members_serial(const StructureExpr& expr) {
  const std::uint64_t count = checked_space(expr);
  std::vector<std::uint8_t> members(count);
  for (std::uint64_t x = 0; x < count; ++x) {
    members[x] = membership_mask(expr, x) ? 1 : 0;
  }
  return members;
}

std::vector<std::uint8_t> enumerate_members_parallel(const StructureExpr& expr) {
  const std::uint64_t count = checked_space(expr);
  std::vector<std::uint8_t> members(count);
  const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (std::int64_t x = 0; x < total; ++x) {
    members[x] = membership_mask(expr, static_cast<std::uint64_t>(x)) ? 1 : 0;
  }
  return members;
}

std::vector<std::uint64_t> count_by_weight_serial(const StructureExpr& expr) {
  const std::uint64_t count = checked_space(expr);
  std::vector<std::uint64_t> counts(
      static_cast<std::size_t>(expr.ground_size()) + 1, 0);
  for (std::uint64_t x = 0; x < count; ++x) {
    if (membership_mask(expr, x)) ++counts[std::popcount(x)];
  }
  return counts;
}

std::vector<std::uint64_t> count_by_weight_parallel(const StructureExpr& expr) {
  const std::uint64_t count = checked_space(expr);
  const auto width = static_cast<std::size_t>(expr.ground_size()) + 1;
  std::vector<std::uint64_t> counts(width, 0);
  const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel num_threads(worker_count())
  {
    std::vector<std::uint64_t> local(width, 0);
#pragma omp for schedule(static) nowait
    for (std::int64_t x = 0; x < total; ++x) {
      const auto mask = static_cast<std::uint64_t>(x);
      if (membership_mask(expr, mask)) ++local[std::popcount(mask)];
    }
#pragma omp critical
    for (std::size_t i = 0; i < width; ++i) counts[i] += local[i];
  }
  return counts;
}

std::vector<CurvePoint> curve_serial(const StructureExpr& expr, int points) {
  check_points(points);
  std::vector<CurvePoint> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[i] = curve_point(expr, i, points);
  return out;
}

std::vector<CurvePoint> curve_parallel(const StructureExpr& expr, int points) {
  check_points(points);
  std::vector<CurvePoint> out(static_cast<std::size_t>(points));
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (int i = 0; i < points; ++i) out[i] = curve_point(expr, i, points);
  return out;
}

std::uint64_t mc_count_batch(const StructureExpr& expr, double p,
                             std::uint64_t seed, std::uint64_t batch,
                             std::uint64_t batch_size) {
  auto gen = batch_generator(seed, batch);
  const auto n = static_cast<std::size_t>(expr.ground_size());
  std::uint64_t hits = 0;
  if (n <= 64) {
    for (std::uint64_t s = 0; s < batch_size; ++s) {
      std::uint64_t mask = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (unit_uniform(gen) < p) mask |= std::uint64_t{1} << i;
      }
      if (membership_mask(expr, mask)) ++hits;
    }
    return hits;
  }
  std::vector<std::uint8_t> bits(n);
  for (std::uint64_t s = 0; s < batch_size; ++s) {
    for (auto& b : bits) b = unit_uniform(gen) < p ? 1 : 0;
    if (membership(expr, bits)) ++hits;
  }
  return hits;
}

std::uint64_t mc_count_serial(const StructureExpr& expr, double p,
                              const BatchPlan& plan) {
  std::uint64_t hits = 0;
  for (std::uint64_t b = 0; b < plan.num_batches; ++b) {
    hits += mc_count_batch(expr, p, plan.seed, plan.first_batch + b,
                           plan.batch_size);
  }
  return hits;
}

std::uint64_t mc_count_parallel(const StructureExpr& expr, double p,
                                const BatchPlan& plan) {
  std::uint64_t hits = 0;
  const auto batches = static_cast<std::int64_t>(plan.num_batches);
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : hits) \
    num_threads(worker_count())
  for (std::int64_t b = 0; b < batches; ++b) {
    hits += mc_count_batch(expr, p, plan.seed,
                           plan.first_batch + static_cast<std::uint64_t>(b),
                           plan.batch_size);
  }
  return hits;
}

}  // namespace thresholdlab::kernels
