#include <gtest/gtest.h>

#include <cmath>

#include "thresholdlab/errors.hpp"
#include "thresholdlab/exact_eval.hpp"
#include "thresholdlab/montecarlo.hpp"

using namespace thresholdlab;

namespace {

bool contains(const McEstimate& e, double x) { return e.ci_lo <= x && x <= e.ci_hi; }

StructureExpr ps23() { return product(StructureExpr::parallel(2), StructureExpr::series(3)); }

}  // namespace

TEST(Wilson, MatchesTextbookFormula) {
  for (auto [s, n] : {std::pair<std::uint64_t, std::uint64_t>{0, 100}, {37, 100},
                      {100, 100}, {5000, 10000}, {3, 1000000}}) {
    const double ph = double(s) / double(n);
    const double z = 1.959963984540054;
    const double denom = 1 + z * z / n;
    const double centre = (ph + z * z / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(ph * (1 - ph) / n + z * z / (4.0 * n * n));
    const auto w = wilson_interval(s, n);
    EXPECT_NEAR(w.lo, std::max(0.0, centre - half), 1e-15);
    EXPECT_NEAR(w.hi, std::min(1.0, centre + half), 1e-15);
  }
}

TEST(Wilson, DegenerateCountsStayInside) {
  const auto none = wilson_interval(0, 1000);
  EXPECT_EQ(none.lo, 0.0);
  EXPECT_GT(none.hi, 0.0);
  EXPECT_LT(none.hi, 0.005);
  const auto all = wilson_interval(1000, 1000);
  EXPECT_EQ(all.hi, 1.0);
  EXPECT_LT(all.lo, 1.0);
  EXPECT_THROW(wilson_interval(1, 0), InputError);
  EXPECT_THROW(wilson_interval(5, 4), InputError);
}

TEST(Estimate, SpecExamples) {
  const auto single = estimate_availability(StructureExpr::k_out_of_n(1, 1), 0.5, 100000, 1);
  EXPECT_TRUE(contains(single, 0.5));
  EXPECT_EQ(single.samples, 100000u);
  EXPECT_FALSE(single.cap_hit);

  const auto ps = estimate_availability(ps23(), 0.5, 100000, 1);
  EXPECT_TRUE(contains(ps, 0.578125)) << ps.ci_lo << " " << ps.ci_hi;

  const auto ring = estimate_availability(StructureExpr::consecutive(2, 4), 0.5, 100000, 1);
  EXPECT_TRUE(contains(ring, 0.5625)) << ring.ci_lo << " " << ring.ci_hi;
}

TEST(Estimate, DeterministicForASeed) {
  const auto a = estimate_availability(ps23(), 0.37, 54321, 2024);
  const auto b = estimate_availability(ps23(), 0.37, 54321, 2024);
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_EQ(a.p_hat, b.p_hat);
  EXPECT_EQ(a.ci_lo, b.ci_lo);
  EXPECT_EQ(a.ci_hi, b.ci_hi);
  EXPECT_EQ(a.seed, 2024u);
  const auto c = estimate_availability(ps23(), 0.37, 54321, 2025);
  EXPECT_NE(a.successes, c.successes);
}

TEST(Estimate, EndpointsAreExact) {
  const auto zero = estimate_availability(StructureExpr::k_out_of_n(3, 7), 0.0, 1000, 5);
  EXPECT_EQ(zero.successes, 0u);
  const auto one = estimate_availability(StructureExpr::k_out_of_n(3, 7), 1.0, 1000, 5);
  EXPECT_EQ(one.successes, 1000u);
}

TEST(Estimate, IntervalCoverageAcrossSeeds) {
  const double exact = availability(ps23(), 0.5).value;
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    covered += contains(estimate_availability(ps23(), 0.5, 2000, seed), exact);
  }
  EXPECT_GE(covered, 180);
}

TEST(Estimate, AgreesWithExactEvaluation) {
  const StructureExpr exprs[] = {
      StructureExpr::k_out_of_n(5, 11), StructureExpr::consecutive(3, 12),
      StructureExpr::consecutive(2, 9, Topology::linear), ps23(),
      product(StructureExpr::k_out_of_n(2, 3), StructureExpr::consecutive(2, 5))};
  for (const auto& e : exprs) {
    for (double p : {0.1, 0.45, 0.8}) {
      const auto est = estimate_availability(e, p, 200000, 77);
      const double half = 0.5 * (est.ci_hi - est.ci_lo);
      EXPECT_LE(std::abs(est.p_hat - availability(e, p).value), 4 * half)
          << describe(e) << " p=" << p;
    }
  }
}

TEST(EstimateToHalfwidth, ReachesTheTarget) {
  const auto est = estimate_to_halfwidth(ps23(), 0.5, 0.01, 3);
  EXPECT_LE(0.5 * (est.ci_hi - est.ci_lo), 0.01);
  EXPECT_FALSE(est.cap_hit);
  // About (z/0.01)^2 / 4 samples near p_hat = 1/2.
  EXPECT_GE(est.samples, 9000u);
  EXPECT_LE(est.samples, 16000u);
  EXPECT_TRUE(contains(est, 0.578125));
}

TEST(EstimateToHalfwidth, SymmetricThresholdAtOneHalf) {
  const auto est = estimate_to_halfwidth(StructureExpr::k_out_of_n(51, 101), 0.5, 0.005, 11);
  EXPECT_LE(0.5 * (est.ci_hi - est.ci_lo), 0.005);
  EXPECT_TRUE(contains(est, 0.5));
}

TEST(EstimateToHalfwidth, RareEventsUseFewerSamples) {
  // Near p_hat = 0 the interval narrows quickly.
  const auto est = estimate_to_halfwidth(StructureExpr::parallel(10), 0.1, 0.01, 4);
  EXPECT_LE(0.5 * (est.ci_hi - est.ci_lo), 0.01);
  EXPECT_LE(est.samples, 2048u);
}

TEST(Estimate, InputValidation) {
  EXPECT_THROW(estimate_availability(ps23(), 0.5, 99, 1), InputError);
  EXPECT_THROW(estimate_availability(ps23(), 0.5, kMcSampleCap + 1, 1), InputError);
  EXPECT_THROW(estimate_availability(ps23(), -0.1, 1000, 1), InputError);
  EXPECT_THROW(estimate_availability(ps23(), std::nan(""), 1000, 1), InputError);
  EXPECT_THROW(estimate_to_halfwidth(ps23(), 0.5, 0.0, 1), InputError);
  EXPECT_THROW(estimate_to_halfwidth(ps23(), 0.5, 0.5, 1), InputError);
}
