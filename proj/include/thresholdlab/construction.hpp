#pragma once

/// @file construction.hpp
/// Symmetric monotone properties with a prescribed threshold width of
/// order 1/c(N): an inner majority of size a nested in a parallel-series
/// system, with a chosen by inverting phi_n(x) = x (ln(n/x))^2.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "thresholdlab/structures.hpp"

namespace thresholdlab {

/// phi_n(x) = x (ln(n/x))^2 for 1 <= x <= n.
double phi(std::int64_t n, double x);

/// The x in [1, n/e^2] with |phi(n, x) - y| <= 1e-9 y.
/// Requires (ln n)^2 <= y <= 4n/e^2.
double invert_phi(std::int64_t n, double y);

/// Size-indexed integer sequence c(n) with ln n <= c(n) <= sqrt(n).
class WidthTarget {
 public:
  enum class Kind { ceil_log, ceil_cuberoot, ceil_sqrt, table };

  /// "ceil_log", "ceil_cuberoot", "ceil_sqrt" or "file:PATH".
  static WidthTarget parse(const std::string& spec);
  static WidthTarget builtin(Kind kind);
  /// Rows (n, c). Lookup at n uses the row with the largest n' <= n.
  static WidthTarget from_table(std::map<std::int64_t, std::int64_t> rows,
                                std::string label = "table");
  /// Two-column CSV "n,c"; an optional header line is skipped.
  static WidthTarget from_csv_file(const std::filesystem::path& path);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  /// c(n). Throws InputError below the first table row.
  std::int64_t operator()(std::int64_t n) const;

  /// Throws InputError unless ln n <= c(n) <= ceil(sqrt n) at every size
  /// and c is nondecreasing along the (sorted) sizes. Tables are also
  /// checked row by row.
  void validate(std::span<const std::int64_t> sizes) const;

 private:
  WidthTarget(Kind kind, std::string name,
              std::map<std::int64_t, std::int64_t> rows)
      : kind_(kind), name_(std::move(name)), rows_(std::move(rows)) {}

  Kind kind_;
  std::string name_;
  std::map<std::int64_t, std::int64_t> rows_;
};

/// Integer helpers used by the builtins; exact for all int64 inputs.
std::int64_t ceil_sqrt(std::int64_t n);
std::int64_t ceil_cbrt(std::int64_t n);
std::int64_t ceil_ln(std::int64_t n);

struct ConstructionRecord {
  std::int64_t n;        // requested scale
  std::int64_t c_n;      // c(n)
  double c_tilde;        // min(c(n), 2 sqrt(n) / e)
  double a_real;         // invert_phi(n, c_tilde^2)
  std::int64_t a;        // rounded, clamped to >= 2
  std::int64_t k;        // floor(n / a)
  std::int64_t m;        // floor(log2 k)
  std::int64_t r;        // floor(k / log2 k)
  std::int64_t paper_N;  // floor(n / a) * a
  std::int64_t N;        // realized ground size a * m * r
  StructureExpr expr;    // KOutOfN{a/2, a} (x) B_k
};

/// Smallest k accepted for the outer parallel-series factor.
inline constexpr std::int64_t kMinOuterSize = 4;

ConstructionRecord build_arbitrary_width(const WidthTarget& target,
                                         std::int64_t n);

struct ScalingRow {
  std::int64_t n;
  std::int64_t N;
  std::int64_t c_N;
  double width;
  double width_times_c;
  double p_half;
};

/// One row per size (computed in parallel, ordered as `sizes`).
std::vector<ScalingRow> scaling_experiment(const WidthTarget& target,
                                           std::span<const std::int64_t> sizes,
                                           double epsilon, double tol);

}  // namespace thresholdlab
