#pragma once

/// @file binomial.hpp
/// Binomial probabilities that stay accurate in both tails.
///
/// Probabilities travel as a Level: the value together with its
/// complement, each carried at full relative precision. 1 - x is never
/// formed when x is close to 1.

#include <cstdint>

namespace thresholdlab {

struct Level {
  double p;  // probability
  double q;  // 1 - p, computed independently

  static Level of(double p) { return {p, 1.0 - p}; }
  Level flipped() const { return {q, p}; }
};

/// Loader's saddle-point binomial pmf P(X = x), X ~ Bin(n, p).
double binomial_pmf(std::int64_t x, std::int64_t n, Level p);

/// P(X >= k) and P(X < k) for X ~ Bin(n, p). The smaller side is summed
/// directly outward from its boundary term; the other side is its
/// complement.
Level binomial_upper_tail(std::int64_t n, std::int64_t k, Level p);

/// x ln(1/x), with the convention 0 ln(1/0) = 0.
double entropy_term(double x);

/// 1 - (1 - a)^(1/r), accurate for tiny a.
double one_minus_root_complement(double a, double r);

/// Stirling-series error log(n!) - log(sqrt(2 pi n) (n/e)^n).
double stirling_error(double n);

/// Deviance term x log(x / np) + np - x, accurate for x near np.
double binomial_deviance(double x, double np);

}  // namespace thresholdlab
