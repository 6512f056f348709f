#pragma once

/// @file threshold.hpp
/// Threshold location by inversion of p -> mu_p(A), threshold widths,
/// sharpness, and numerical checks of derivative inequalities that every
/// monotone set must satisfy.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "thresholdlab/structures.hpp"

namespace thresholdlab {

inline constexpr double kDefaultLocateTol = 1e-13;
inline constexpr int kLocateMaxIterations = 200;

/// Slack below which a BoundCheck counts as violated.
inline constexpr double kBoundSlackTolerance = 1e-12;

struct ThresholdReport {
  double epsilon;
  double p_lo;             // mu = epsilon
  double p_hi;             // mu = 1 - epsilon
  double width;            // p_hi - p_lo
  double p_half;           // mu = 1/2
  double sharpness_ratio;  // width / (p_half (1 - p_half))
  double tol;              // bracket width on p
  double mu_at_lo;
  double mu_at_hi;
  double mu_tol_lo;        // propagated tolerance on mu at p_lo
  double mu_tol_hi;
};

/// Unique p with mu_p(expr) = alpha, by bisection on [0,1] until the
/// bracket is at most `tol` wide. Returns the bracket midpoint.
/// Throws ConvergenceError (with the bracket) after kLocateMaxIterations.
double locate(const StructureExpr& expr, double alpha,
              double tol = kDefaultLocateTol);

/// Threshold width at level epsilon in (0, 1/2].
ThresholdReport width(const StructureExpr& expr, double epsilon,
                      double tol = kDefaultLocateTol);

/// Upper bound 2 sqrt(ln(1/eps) / (2n)) on the majority threshold width.
double hoeffding_width_bound(std::int64_t n, double epsilon);

enum class Relation { greater_equal, less_equal };

/// One evaluated inequality `lhs (>= | <=) rhs`. slack is signed so that
/// the inequality holds iff slack >= -kBoundSlackTolerance.
struct BoundCheck {
  std::string name;
  double p;
  double lhs;
  double rhs;
  Relation relation;
  double slack;
  bool holds;
};

BoundCheck make_bound_check(std::string name, double p, double lhs, double rhs,
                            Relation relation);

/// Entropy lower bounds on the derivative:
///   p ln(1/p) mu' >= mu ln(1/mu)                       (first)
///   (1-p) ln(1/(1-p)) mu' >= (1-mu) ln(1/(1-mu))       (second)
struct EntropyChecks {
  BoundCheck lower;
  BoundCheck upper;
};
EntropyChecks check_entropy_inequalities(const StructureExpr& expr, double p);

/// mu' <= sqrt(mu (1-mu)) sqrt(n / (p (1-p))), n = ground size.
BoundCheck check_cauchy_schwarz_bound(const StructureExpr& expr, double p);

/// Gaussian isoperimetric profile phi(Phi^{-1}(x)).
double gaussian_isoperimetric(double x);

/// For the majority A_{floor(n/2), n}:
///   mu' >= sqrt(n) / (p sqrt(ln(1/p))) * Psi(mu).
BoundCheck check_isoperimetric_bound(std::int64_t n, double p);

/// Size-indexed structure generator.
struct Family {
  std::string name;
  std::function<StructureExpr(std::int64_t)> make;
};

Family majority_family();
Family series_family();
Family parallel_family();
Family parallel_series_family();  // index k -> B_k
Family singleton_family();        // KOutOfN{1,1} at every index

/// Normalizing scale applied to the ground size of each family member.
using Scale = std::function<double(std::int64_t ground_size)>;

struct HomogeneityRow {
  std::int64_t n;
  std::int64_t ground_size;
  double p_beta;
  double p_gamma;
  double normalized_gap;  // (p_gamma - p_beta) * scale / (gamma - beta)
};

/// Rows are computed independently (in parallel) and ordered as `sizes`.
std::vector<HomogeneityRow> homogeneity_scan(const Family& family,
                                             std::span<const std::int64_t> sizes,
                                             double beta, double gamma,
                                             const Scale& scale,
                                             double tol = kDefaultLocateTol);

struct SharpnessRow {
  std::int64_t n;
  std::int64_t ground_size;
  double p_half;
  double width;
  double sharpness_ratio;
  double slope_term;  // p (1-p) mu' at p_half
};

std::vector<SharpnessRow> sharpness_trend(const Family& family,
                                          std::span<const std::int64_t> sizes,
                                          double epsilon,
                                          double tol = kDefaultLocateTol);

}  // namespace thresholdlab
