#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "thresholdlab/errors.hpp"
#include "thresholdlab/exact_eval.hpp"
#include "thresholdlab/structures.hpp"

using namespace thresholdlab;

namespace {

std::vector<StructureExpr> small_fixtures() {
  return {
      StructureExpr::k_out_of_n(1, 1),
      StructureExpr::k_out_of_n(2, 3),
      StructureExpr::series(4),
      StructureExpr::parallel(4),
      StructureExpr::consecutive(2, 6),
      StructureExpr::consecutive(3, 7, Topology::linear),
      product(StructureExpr::parallel(2), StructureExpr::series(3)),
      product(StructureExpr::k_out_of_n(2, 3), StructureExpr::k_out_of_n(2, 3)),
      product(StructureExpr::consecutive(2, 4), StructureExpr::k_out_of_n(1, 2)),
  };
}

}  // namespace

TEST(Configuration, BitstringAndMaskRoundTrip) {
  const auto cfg = Configuration::from_bitstring("1011");
  EXPECT_EQ(cfg.size(), 4u);
  EXPECT_EQ(cfg.to_mask(), 0b1101u);
  EXPECT_EQ(cfg.to_bitstring(), "1011");
  EXPECT_EQ(Configuration::from_mask(0b1101, 4), cfg);
  EXPECT_THROW(Configuration::from_bitstring("10a1"), InputError);
  EXPECT_THROW(Configuration(std::vector<std::uint8_t>{0, 2}), InputError);
}

TEST(KOutOfN, MembershipExamples) {
  const auto a = StructureExpr::k_out_of_n(2, 3);
  EXPECT_TRUE(membership(a, Configuration::from_bitstring("110")));
  EXPECT_FALSE(membership(a, Configuration::from_bitstring("100")));
  EXPECT_TRUE(membership(StructureExpr::series(3), Configuration::from_bitstring("001")));
  EXPECT_FALSE(membership(StructureExpr::parallel(3), Configuration::from_bitstring("110")));
}

TEST(KOutOfN, RejectsTrivialParameters) {
  EXPECT_THROW(StructureExpr::k_out_of_n(0, 3), InputError);
  EXPECT_THROW(StructureExpr::k_out_of_n(4, 3), InputError);
  EXPECT_THROW(StructureExpr::k_out_of_n(1, 0), InputError);
  EXPECT_THROW(StructureExpr::consecutive(0, 5), InputError);
  EXPECT_THROW(StructureExpr::consecutive(6, 5), InputError);
}

TEST(KOutOfN, MaskMembershipMatchesCount) {
  for (int n = 1; n <= 8; ++n) {
    for (int k = 1; k <= n; ++k) {
      const auto a = StructureExpr::k_out_of_n(k, n);
      for (std::uint64_t x = 0; x < (1u << n); ++x) {
        ASSERT_EQ(membership_mask(a, x), oracle::k_out_of_n(x, k));
        ASSERT_EQ(membership(a, Configuration::from_mask(x, n)), oracle::k_out_of_n(x, k));
      }
    }
  }
}

TEST(Consecutive, MembershipMatchesWindowScan) {
  for (int n = 1; n <= 10; ++n) {
    for (int k = 1; k <= n; ++k) {
      for (bool circular : {true, false}) {
        const auto c = StructureExpr::consecutive(
            k, n, circular ? Topology::circular : Topology::linear);
        for (std::uint64_t x = 0; x < (1u << n); ++x) {
          const bool expected = oracle::consecutive(x, k, n, circular);
          ASSERT_EQ(membership_mask(c, x), expected) << n << " " << k << " " << x;
          ASSERT_EQ(membership(c, Configuration::from_mask(x, n)), expected);
        }
      }
    }
  }
}

TEST(Consecutive, WrapAroundExamples) {
  const auto circ = StructureExpr::consecutive(2, 4);
  const auto line = StructureExpr::consecutive(2, 4, Topology::linear);
  const auto wrap = Configuration::from_bitstring("1001");
  EXPECT_TRUE(membership(circ, wrap));
  EXPECT_FALSE(membership(line, wrap));
}

TEST(Consecutive, SixtyFourBitMask) {
  const auto c = StructureExpr::consecutive(3, 64);
  const std::uint64_t wrap = (std::uint64_t{1} << 63) | 0b11;
  EXPECT_TRUE(membership_mask(c, wrap));
  EXPECT_FALSE(membership_mask(c, (std::uint64_t{1} << 63) | 0b1));
}

TEST(Product, MembershipDecomposesByBlocks) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int r = 1 + static_cast<int>(gen() % 4);
    const int m = 1 + static_cast<int>(gen() % 4);
    const auto inner = StructureExpr::explicit_bitmap(r, oracle::random_up_set(r, gen));
    const auto outer = StructureExpr::explicit_bitmap(m, oracle::random_up_set(m, gen));
    const auto prod = product(inner, outer);
    ASSERT_EQ(prod.ground_size(), r * m);
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << (r * m)); ++x) {
      std::uint64_t indicator = 0;
      for (int j = 0; j < m; ++j) {
        const std::uint64_t block = (x >> (j * r)) & ((1u << r) - 1);
        if (membership_mask(inner, block)) indicator |= 1u << j;
      }
      ASSERT_EQ(membership_mask(prod, x), membership_mask(outer, indicator));
      ASSERT_EQ(membership(prod, Configuration::from_mask(x, r * m)),
                membership_mask(prod, x));
    }
  }
}

TEST(Product, BlockMajorLayout) {
  // Block j occupies coordinates j*r .. j*r + r - 1.
  const auto prod = product(StructureExpr::parallel(2), StructureExpr::series(3));
  EXPECT_TRUE(membership(prod, Configuration::from_bitstring("001100")));
  EXPECT_FALSE(membership(prod, Configuration::from_bitstring("010100")));
}

TEST(Product, AssociativeUpToRelabeling) {
  const auto a = StructureExpr::k_out_of_n(2, 3);
  const auto b = StructureExpr::consecutive(2, 4);
  const auto c = StructureExpr::series(2);
  const auto left = product(product(a, b), c);
  const auto right = product(a, product(b, c));
  for (int i = 0; i <= 20; ++i) {
    const double p = i / 20.0;
    EXPECT_NEAR(availability(left, p).value, availability(right, p).value, 1e-12);
  }
}

TEST(Explicit, RejectsSetsThatAreNotUpClosed) {
  // {(1,0)} misses (1,1).
  try {
    StructureExpr::explicit_set(2, {Configuration::from_bitstring("10")});
    FAIL() << "expected rejection";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("11"), std::string::npos);
  }
}

TEST(Explicit, RejectsTrivialSets) {
  EXPECT_THROW(StructureExpr::explicit_set(2, {}), InputError);
  std::vector<Configuration> all;
  for (std::uint64_t x = 0; x < 4; ++x) all.push_back(Configuration::from_mask(x, 2));
  EXPECT_THROW(StructureExpr::explicit_set(2, all), InputError);
  EXPECT_THROW(StructureExpr::explicit_set(21, {}), InputError);
  EXPECT_THROW(StructureExpr::explicit_set(2, {Configuration::from_bitstring("111")}),
               InputError);
}

TEST(Explicit, MembershipFromMemberList) {
  const auto e = StructureExpr::explicit_set(
      2, {Configuration::from_bitstring("10"), Configuration::from_bitstring("11")});
  EXPECT_TRUE(membership(e, Configuration::from_bitstring("10")));
  EXPECT_FALSE(membership(e, Configuration::from_bitstring("01")));
  EXPECT_EQ(describe(e), "Explicit{n=2,members=2}");
}

TEST(Membership, LengthMismatchIsRejected) {
  EXPECT_THROW(membership(StructureExpr::series(3), Configuration::from_bitstring("10")),
               InputError);
}

TEST(Monotone, FixturesAreUpClosed) {
  for (const auto& expr : small_fixtures()) {
    EXPECT_TRUE(verify_monotone(expr)) << describe(expr);
    EXPECT_TRUE(spot_check_monotone(expr, 2000, 5)) << describe(expr);
  }
}

TEST(Monotone, RandomExplicitProductsAreUpClosed) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int r = 1 + static_cast<int>(gen() % 3);
    const int m = 1 + static_cast<int>(gen() % 4);
    const auto prod =
        product(StructureExpr::explicit_bitmap(r, oracle::random_up_set(r, gen)),
                StructureExpr::explicit_bitmap(m, oracle::random_up_set(m, gen)));
    EXPECT_TRUE(verify_monotone(prod));
  }
}

TEST(Monotone, LargeStructuresAreSpotChecked) {
  EXPECT_THROW(verify_monotone(majority(101)), InputError);
  EXPECT_TRUE(spot_check_monotone(majority(101), 5000, 1));
  EXPECT_TRUE(spot_check_monotone(StructureExpr::consecutive(4, 200), 5000, 2));
  EXPECT_TRUE(spot_check_monotone(parallel_series(1 << 10), 5000, 3));
}

TEST(Permutation, ValidatesBijections) {
  EXPECT_THROW(PermutationPair({0, 0}, {0}), InputError);
  EXPECT_THROW(PermutationPair({0, 2}, {0}), InputError);
  EXPECT_NO_THROW(PermutationPair({1, 0}, {0}));
}

TEST(Permutation, ApplyUsesBlockMajorGrid) {
  const PermutationPair swap_blocks({0, 1}, {1, 0});
  EXPECT_EQ(swap_blocks.apply(Configuration::from_bitstring("1000")).to_bitstring(),
            "0010");
  const PermutationPair swap_within({1, 0}, {0, 1});
  EXPECT_EQ(swap_within.apply(Configuration::from_bitstring("1000")).to_bitstring(),
            "0100");
}

TEST(Permutation, ProductsAreInvariant) {
  const auto prod = product(StructureExpr::parallel(2), StructureExpr::series(2));
  EXPECT_TRUE(verify_invariance(prod, PermutationPair::identity(2, 2)));
  EXPECT_TRUE(verify_invariance(prod, PermutationPair({1, 0}, {1, 0})));

  const auto three = product(StructureExpr::k_out_of_n(2, 3), StructureExpr::consecutive(2, 4));
  EXPECT_TRUE(verify_invariance(three, PermutationPair({2, 0, 1}, {1, 2, 3, 0})));
  EXPECT_THROW(verify_invariance(StructureExpr::series(3), PermutationPair::identity(3, 1)),
               InputError);
}

TEST(Permutation, AsymmetricInnerBreaksInvariance) {
  // Inner set {x0 = 1} is not invariant under swapping its coordinates.
  const auto inner = StructureExpr::explicit_set(
      2, {Configuration::from_bitstring("10"), Configuration::from_bitstring("11")});
  const auto prod = product(inner, StructureExpr::series(2));
  EXPECT_FALSE(verify_invariance(prod, PermutationPair({1, 0}, {0, 1})));
  EXPECT_TRUE(verify_invariance(prod, PermutationPair({0, 1}, {1, 0})));
}

TEST(KOutOfN, InvariantUnderEveryPermutation) {
  const auto a = StructureExpr::k_out_of_n(2, 4);
  std::vector<int> perm(4);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (std::uint64_t x = 0; x < 16; ++x) {
      std::uint64_t y = 0;
      for (int i = 0; i < 4; ++i) y |= ((x >> perm[i]) & 1) << i;
      ASSERT_EQ(membership_mask(a, x), membership_mask(a, y));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(Families, ParallelSeriesAndMajority) {
  const auto b = parallel_series(1024);
  EXPECT_EQ(b.ground_size(), 10 * 102);
  EXPECT_EQ(describe(b), "Product{KOutOfN{10,10},KOutOfN{1,102}}");
  EXPECT_EQ(describe(majority(101)), "KOutOfN{50,101}");
  EXPECT_THROW(parallel_series(1), InputError);
  EXPECT_THROW(product(StructureExpr::series(std::int64_t{1} << 30),
                       StructureExpr::series(std::int64_t{1} << 30)),
               InputError);
}
