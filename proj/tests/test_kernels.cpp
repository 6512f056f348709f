#include <gtest/gtest.h>

#include <omp.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>

#include "oracles.hpp"
#include "thresholdlab/kernels.hpp"
#include "thresholdlab/parallel.hpp"

using namespace thresholdlab;

namespace {

class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) { setenv("THRESHOLDLAB_THREADS", value, 1); }
  ~ThreadsEnv() { unsetenv("THRESHOLDLAB_THREADS"); }
};

std::vector<StructureExpr> fixtures() {
  std::mt19937_64 gen(5);
  return {
      StructureExpr::k_out_of_n(7, 16),
      StructureExpr::consecutive(3, 18),
      StructureExpr::consecutive(4, 17, Topology::linear),
      product(StructureExpr::parallel(3), StructureExpr::series(6)),
      product(StructureExpr::k_out_of_n(2, 3), StructureExpr::consecutive(2, 6)),
      StructureExpr::explicit_bitmap(12, oracle::random_up_set(12, gen)),
  };
}

bool same(const kernels::CurvePoint& a, const kernels::CurvePoint& b) {
  const auto eq = [](double x, double y) {
    return x == y || (std::isnan(x) && std::isnan(y));
  };
  return eq(a.p, b.p) && eq(a.mu, b.mu) && eq(a.dmu_dp, b.dmu_dp);
}

}  // namespace

TEST(Kernels, MembersMatchSerialTwin) {
  for (const auto& e : fixtures()) {
    const auto serial = kernels::enumerate_members_serial(e);
    EXPECT_EQ(serial, kernels::enumerate_members_parallel(e)) << describe(e);
    ASSERT_EQ(serial.size(), std::size_t{1} << e.ground_size());
    for (std::uint64_t mask = 0; mask < serial.size(); mask += 97) {
      EXPECT_EQ(bool(serial[mask]), membership_mask(e, mask)) << describe(e) << " " << mask;
    }
  }
}

TEST(Kernels, CountsMatchSerialTwin) {
  for (const auto& e : fixtures()) {
    const auto serial = kernels::count_by_weight_serial(e);
    EXPECT_EQ(serial, kernels::count_by_weight_parallel(e)) << describe(e);
  }
  // Above the threshold the weight counts are binomial coefficients.
  const auto counts = kernels::count_by_weight_serial(StructureExpr::k_out_of_n(7, 16));
  EXPECT_EQ(counts[6], 0u);
  EXPECT_EQ(counts[7], 11440u);
  EXPECT_EQ(counts[16], 1u);
}

TEST(Kernels, CurveMatchesSerialTwin) {
  for (const auto& e : fixtures()) {
    const auto serial = kernels::curve_serial(e, 41);
    const auto parallel = kernels::curve_parallel(e, 41);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      EXPECT_TRUE(same(serial[i], parallel[i])) << describe(e) << " i=" << i;
    }
    EXPECT_EQ(serial.front().p, 0.0);
    EXPECT_EQ(serial.back().p, 1.0);
    EXPECT_TRUE(std::isnan(serial.front().dmu_dp));
    EXPECT_TRUE(std::isnan(serial.back().dmu_dp));
  }
}

TEST(Kernels, McCountMatchesSerialTwin) {
  const kernels::BatchPlan plan{99, 3, 40, 1024};
  for (const auto& e : fixtures()) {
    EXPECT_EQ(kernels::mc_count_serial(e, 0.4, plan), kernels::mc_count_parallel(e, 0.4, plan));
  }
}

TEST(Kernels, McBatchesAreIndependentStreams) {
  const auto e = product(StructureExpr::parallel(2), StructureExpr::series(3));
  const kernels::BatchPlan plan{7, 10, 25, 512};
  std::uint64_t sum = 0;
  for (std::uint64_t b = 0; b < plan.num_batches; ++b) {
    sum += kernels::mc_count_batch(e, 0.5, plan.seed, plan.first_batch + b, plan.batch_size);
  }
  EXPECT_EQ(sum, kernels::mc_count_serial(e, 0.5, plan));
  // Splitting a plan does not change its batches.
  const kernels::BatchPlan head{7, 10, 12, 512}, tail{7, 22, 13, 512};
  EXPECT_EQ(kernels::mc_count_parallel(e, 0.5, head) + kernels::mc_count_parallel(e, 0.5, tail),
            sum);
  EXPECT_NE(kernels::mc_count_batch(e, 0.5, 7, 0, 512), kernels::mc_count_batch(e, 0.5, 7, 1, 512));
}

TEST(Threads, EnvironmentFixesWorkerCount) {
  {
    ThreadsEnv env("3");
    EXPECT_EQ(worker_count(), 3);
    std::atomic<int> widest{0};
    parallel_rows(64, [&](std::size_t) {
      int t = omp_get_num_threads();
      int seen = widest.load();
      while (t > seen && !widest.compare_exchange_weak(seen, t)) {
      }
    });
    EXPECT_EQ(widest.load(), 3);
  }
  {
    ThreadsEnv env("0");
    EXPECT_EQ(worker_count(), omp_get_max_threads());
  }
  {
    ThreadsEnv env("junk");
    EXPECT_EQ(worker_count(), omp_get_max_threads());
  }
  EXPECT_EQ(worker_count(), omp_get_max_threads());
}

TEST(Threads, ResultsIndependentOfWorkerCount) {
  const auto e = StructureExpr::consecutive(3, 18);
  const kernels::BatchPlan plan{1, 0, 64, 1024};
  std::vector<std::uint64_t> counts;
  std::uint64_t mc = 0;
  {
    ThreadsEnv env("1");
    counts = kernels::count_by_weight_parallel(e);
    mc = kernels::mc_count_parallel(e, 0.3, plan);
  }
  ThreadsEnv env("5");
  EXPECT_EQ(kernels::count_by_weight_parallel(e), counts);
  EXPECT_EQ(kernels::mc_count_parallel(e, 0.3, plan), mc);
}

TEST(Threads, LowestFailingRowIsRethrown) {
  ThreadsEnv env("4");
  try {
    parallel_rows(100, [](std::size_t i) {
      if (i % 10 == 7) throw std::runtime_error("row " + std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "row 7");
  }
}
