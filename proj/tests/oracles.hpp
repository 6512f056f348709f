#pragma once

// Test-side reference computations. Nothing here calls the evaluation
// code under test: members are decided from first principles and sums are
// taken by plain enumeration or in long double.

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "thresholdlab/structures.hpp"

namespace oracle {

// Failure-set membership straight from the definitions.
inline bool k_out_of_n(std::uint64_t mask, int k) { return std::popcount(mask) >= k; }

inline bool consecutive(std::uint64_t mask, int k, int n, bool circular) {
  const int span = circular ? n : n - k + 1;
  for (int start = 0; start < span; ++start) {
    bool all = true;
    for (int j = 0; j < k && all; ++j) all = (mask >> ((start + j) % n)) & 1;
    if (all) return true;
  }
  return false;
}

// Flat sum over all 2^n masks of a member predicate.
template <class Member>
double flat_availability(int n, double p, Member member) {
  long double total = 0.0L;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    if (!member(x)) continue;
    const int w = std::popcount(x);
    total += std::pow(static_cast<long double>(p), w) *
             std::pow(1.0L - p, n - w);
  }
  return static_cast<double>(total);
}

// Flat sum using the library's membership only (no evaluation code).
inline double flat_availability(const thresholdlab::StructureExpr& expr, double p) {
  const int n = static_cast<int>(expr.ground_size());
  return flat_availability(n, p, [&](std::uint64_t x) {
    return thresholdlab::membership_mask(expr, x);
  });
}

// P(X >= k), X ~ Bin(n, p), by direct log-space term summation in long
// double. Adequate for n up to ~1e6 at the tolerances used in tests.
inline double binomial_upper_tail(std::int64_t n, std::int64_t k, double p) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  const long double lp = std::log(static_cast<long double>(p));
  const long double lq = std::log1p(-static_cast<long double>(p));
  const long double ln1 = std::lgamma(static_cast<long double>(n) + 1);
  long double total = 0.0L;
  for (std::int64_t i = k; i <= n; ++i) {
    const long double lt = ln1 - std::lgamma(static_cast<long double>(i) + 1) -
                           std::lgamma(static_cast<long double>(n - i) + 1) +
                           i * lp + (n - i) * lq;
    total += std::exp(lt);
  }
  return static_cast<double>(total);
}

// mu_p of parallel(m) (x) series(r): 1 - (1 - p^m)^r.
inline double parallel_series_value(int m, int r, double p) {
  return -std::expm1(r * std::log1p(-std::pow(p, m)));
}

// Inverse of the above: (1 - (1 - alpha)^(1/r))^(1/m).
inline double parallel_series_locate(int m, int r, double alpha) {
  return std::pow(-std::expm1(std::log1p(-alpha) / r), 1.0 / m);
}

// Random nontrivial up-closed set on n <= 12 coordinates: the up-closure
// of a few random generators, none of them the zero vector.
inline std::vector<bool> random_up_set(int n, std::mt19937_64& gen) {
  const std::uint64_t size = std::uint64_t{1} << n;
  std::uniform_int_distribution<std::uint64_t> pick(1, size - 1);
  std::uniform_int_distribution<int> count(1, 3);
  std::vector<bool> members(size, false);
  const int gens = count(gen);
  for (int g = 0; g < gens; ++g) {
    const std::uint64_t base = pick(gen);
    for (std::uint64_t x = 0; x < size; ++x) {
      if ((x & base) == base) members[x] = true;
    }
  }
  return members;
}

}  // namespace oracle
