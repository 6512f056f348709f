#include "thresholdlab/threshold.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "thresholdlab/errors.hpp"
#include "thresholdlab/exact_eval.hpp"
#include "thresholdlab/parallel.hpp"

namespace thresholdlab {

namespace {

constexpr double kMinLocateTol = 1e-14;

// Psi at the smaller of x and 1 - x; the profile is symmetric.
double isoperimetric_of(Level x) {
  const double tail = std::min(x.p, x.q);
  if (!(tail > 0.0)) {
    throw InputError("isoperimetric profile requires a value in (0,1)");
  }
  if (tail == 0.5) return 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const boost::math::normal_distribution<double> standard;
  const double z = boost::math::quantile(standard, tail);
  return boost::math::pdf(standard, z);
}

double validated_level(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) {
    throw InputError("epsilon must lie in (0, 1/2], got " +
                     std::to_string(epsilon));
  }
  return epsilon;
}

void check_open_unit(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InputError(std::string(what) + " requires 0 < p < 1, got " +
                     std::to_string(p));
  }
}

}  // namespace

double locate(const StructureExpr& expr, double alpha, double tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InputError("locate: alpha must lie in (0,1), got " +
                     std::to_string(alpha));
  }
  if (!(tol >= kMinLocateTol)) {
    throw InputError("locate: tol must be at least 1e-14");
  }
  // Compare on whichever side keeps full relative precision.
  const bool upper_half = alpha > 0.5;
  const double target = upper_half ? 1.0 - alpha : alpha;
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < kLocateMaxIterations; ++iter) {
    if (hi - lo <= tol) return 0.5 * (lo + hi);
    const double mid = 0.5 * (lo + hi);
    const auto e = availability(expr, Level{mid, 1.0 - mid});
    const bool below = upper_half ? e.complement > target : e.value < target;
    if (below) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (hi - lo <= tol) return 0.5 * (lo + hi);
  throw ConvergenceError("locate: bracket did not shrink below tol within " +
                             std::to_string(kLocateMaxIterations) +
                             " iterations",
                         lo, hi);
}

ThresholdReport width(const StructureExpr& expr, double epsilon, double tol) {
  validated_level(epsilon);
  ThresholdReport r{};
  r.epsilon = epsilon;
  r.tol = tol;
  r.p_lo = locate(expr, epsilon, tol);
  r.p_hi = epsilon == 0.5 ? r.p_lo : locate(expr, 1.0 - epsilon, tol);
  r.p_half = epsilon == 0.5 ? r.p_lo : locate(expr, 0.5, tol);
  r.width = r.p_hi - r.p_lo;
  r.sharpness_ratio = r.width / (r.p_half * (1.0 - r.p_half));

  const auto at_lo = evaluate_with_slope(expr, Level::of(r.p_lo));
  const auto at_hi = evaluate_with_slope(expr, Level::of(r.p_hi));
  const auto err_lo = availability(expr, r.p_lo).abs_error_bound;
  const auto err_hi = availability(expr, r.p_hi).abs_error_bound;
  r.mu_at_lo = at_lo.value;
  r.mu_at_hi = at_hi.value;
  r.mu_tol_lo = 0.5 * tol * std::abs(at_lo.slope) + err_lo;
  r.mu_tol_hi = 0.5 * tol * std::abs(at_hi.slope) + err_hi;
  return r;
}

double hoeffding_width_bound(std::int64_t n, double epsilon) {
  if (n < 1) throw InputError("hoeffding bound requires n >= 1");
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw InputError("hoeffding bound requires 0 < epsilon < 1/2");
  }
  return 2.0 * std::sqrt(std::log(1.0 / epsilon) / (2.0 * static_cast<double>(n)));
}

BoundCheck make_bound_check(std::string name, double p, double lhs, double rhs,
                            Relation relation) {
  const double slack =
      relation == Relation::greater_equal ? lhs - rhs : rhs - lhs;
  return {std::move(name), p,     lhs,
          rhs,             relation, slack,
          slack >= -kBoundSlackTolerance};
}

EntropyChecks check_entropy_inequalities(const StructureExpr& expr, double p) {
  check_open_unit(p, "entropy check");
  const auto s = evaluate_with_slope(expr, Level::of(p));
  const double q = 1.0 - p;
  return {
      make_bound_check("entropy_lower", p, entropy_term(p) * s.slope,
                       entropy_term(s.value), Relation::greater_equal),
      make_bound_check("entropy_upper", p, entropy_term(q) * s.slope,
                       entropy_term(s.complement), Relation::greater_equal),
  };
}

BoundCheck check_cauchy_schwarz_bound(const StructureExpr& expr, double p) {
  check_open_unit(p, "Cauchy-Schwarz check");
  const auto s = evaluate_with_slope(expr, Level::of(p));
  const auto n = static_cast<double>(expr.ground_size());
  const double rhs = std::sqrt(s.value * s.complement) *
                     std::sqrt(n / (p * (1.0 - p)));
  return make_bound_check("cauchy_schwarz", p, s.slope, rhs,
                          Relation::less_equal);
}

double gaussian_isoperimetric(double x) {
  if (!(x > 0.0 && x < 1.0)) {
    throw InputError("isoperimetric profile requires x in (0,1)");
  }
  return isoperimetric_of(Level::of(x));
}

BoundCheck check_isoperimetric_bound(std::int64_t n, double p) {
  check_open_unit(p, "isoperimetric check");
  const auto expr = majority(n);
  const auto s = evaluate_with_slope(expr, Level::of(p));
  const double psi = isoperimetric_of(Level{s.value, s.complement});
  const double rhs = std::sqrt(static_cast<double>(n)) /
                     (p * std::sqrt(std::log(1.0 / p))) * psi;
  return make_bound_check("isoperimetric", p, s.slope, rhs,
                          Relation::greater_equal);
}

Family majority_family() {
  return {"majority", [](std::int64_t n) { return majority(n); }};
}

Family series_family() {
  return {"series", [](std::int64_t n) { return StructureExpr::series(n); }};
}

Family parallel_family() {
  return {"parallel", [](std::int64_t n) { return StructureExpr::parallel(n); }};
}

Family parallel_series_family() {
  return {"parallel_series", [](std::int64_t k) { return parallel_series(k); }};
}

Family singleton_family() {
  return {"singleton",
          [](std::int64_t) { return StructureExpr::k_out_of_n(1, 1); }};
}

std::vector<HomogeneityRow> homogeneity_scan(const Family& family,
                                             std::span<const std::int64_t> sizes,
                                             double beta, double gamma,
                                             const Scale& scale, double tol) {
  if (!(beta > 0.0 && beta < gamma && gamma < 1.0)) {
    throw InputError("homogeneity scan requires 0 < beta < gamma < 1");
  }
  std::vector<HomogeneityRow> rows(sizes.size());
  parallel_rows(sizes.size(), [&](std::size_t i) {
    const auto expr = family.make(sizes[i]);
    HomogeneityRow& row = rows[i];
    row.n = sizes[i];
    row.ground_size = expr.ground_size();
    row.p_beta = locate(expr, beta, tol);
    row.p_gamma = locate(expr, gamma, tol);
    row.normalized_gap =
        (row.p_gamma - row.p_beta) * scale(row.ground_size) / (gamma - beta);
  });
  return rows;
}

std::vector<SharpnessRow> sharpness_trend(const Family& family,
                                          std::span<const std::int64_t> sizes,
                                          double epsilon, double tol) {
  validated_level(epsilon);
  std::vector<SharpnessRow> rows(sizes.size());
  parallel_rows(sizes.size(), [&](std::size_t i) {
    const auto expr = family.make(sizes[i]);
    const auto report = width(expr, epsilon, tol);
    const double slope = derivative(expr, report.p_half);
    rows[i] = {sizes[i],
               expr.ground_size(),
               report.p_half,
               report.width,
               report.sharpness_ratio,
               report.p_half * (1.0 - report.p_half) * slope};
  });
  return rows;
}

}  // namespace thresholdlab
