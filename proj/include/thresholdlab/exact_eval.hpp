#pragma once

/// @file exact_eval.hpp
/// Exact (non-sampling) evaluation of mu_p(A), its derivative in p, the
/// coordinate influences, and the reliability polynomial.

#include <cstdint>
#include <string_view>
#include <vector>

#include "thresholdlab/binomial.hpp"
#include "thresholdlab/structures.hpp"

namespace thresholdlab {

enum class EvalMethod { closed_form, binomial_tail, dp, brute_force, composed };

std::string_view to_string(EvalMethod method);

struct EvalResult {
  double value;            // mu_p(A)
  double complement;       // 1 - mu_p(A), evaluated independently
  EvalMethod method;
  double abs_error_bound;  // estimated absolute error on `value`
};

/// N_i = number of members with exactly i failed components.
struct ReliabilityPolynomial {
  int n;
  std::vector<std::uint64_t> counts;

  /// sum_i N_i p^i (1-p)^(n-i).
  double evaluate(double p) const;
};

/// mu_p(expr). Throws InputError for p outside [0,1].
EvalResult availability(const StructureExpr& expr, double p);

/// Same, with p given together with its complement.
EvalResult availability(const StructureExpr& expr, Level p);

/// d mu_p(expr) / dp for 0 < p < 1.
double derivative(const StructureExpr& expr, double p);

/// Value, complement and derivative in one pass. Endpoints allowed.
struct CurveSample {
  double value;
  double complement;
  double slope;
};
CurveSample evaluate_with_slope(const StructureExpr& expr, Level p);

/// Influence (pivotality probability) of each coordinate at p.
/// Requires ground_size(expr) <= kExhaustiveCap and 0 < p < 1.
std::vector<double> influences(const StructureExpr& expr, double p);

/// Exact counts. KOutOfN is closed form for n <= 67 (64-bit counts); other
/// structures are enumerated and require ground_size <= kExhaustiveCap.
ReliabilityPolynomial reliability_polynomial(const StructureExpr& expr);

}  // namespace thresholdlab
