// Serial vs OpenMP timings for the data-parallel kernels. Each pair is
// also compared for identical output.

#include <chrono>
#include <cstdio>
#include <functional>

#include "thresholdlab/kernels.hpp"
#include "thresholdlab/parallel.hpp"
#include "thresholdlab/structures.hpp"

namespace tl = thresholdlab;

namespace thresholdlab::kernels {
// NaN-aware: endpoint derivatives are NaN in both results.
bool operator==(const CurvePoint& a, const CurvePoint& b) {
  auto eq = [](double x, double y) { return x == y || (x != x && y != y); };
  return eq(a.p, b.p) && eq(a.mu, b.mu) && eq(a.dmu_dp, b.dmu_dp);
}
}  // namespace thresholdlab::kernels

namespace {

template <class F>
double seconds(F&& f, int reps) {
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
  return d.count() / reps;
}

template <class Serial, class Parallel>
void row(const char* name, Serial serial, Parallel parallel, int reps) {
  const bool same = serial() == parallel();
  const double ts = seconds(serial, reps);
  const double tp = seconds(parallel, reps);
  std::printf("%-28s serial %10.4f ms  parallel %10.4f ms  speedup %5.2fx  %s\n",
              name, ts * 1e3, tp * 1e3, ts / tp, same ? "match" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("workers: %d\n", tl::worker_count());

  const auto small = tl::product(tl::StructureExpr::k_out_of_n(2, 4),
                                 tl::StructureExpr::consecutive(2, 5));
  row("enumerate_members (n=20)",
      [&] { return tl::kernels::enumerate_members_serial(small); },
      [&] { return tl::kernels::enumerate_members_parallel(small); }, 3);
  row("count_by_weight (n=20)",
      [&] { return tl::kernels::count_by_weight_serial(small); },
      [&] { return tl::kernels::count_by_weight_parallel(small); }, 3);

  const auto big = tl::product(tl::majority(101), tl::parallel_series(1 << 14));
  row("curve (B_2^14 x maj101, 2001)",
      [&] { return tl::kernels::curve_serial(big, 2001); },
      [&] { return tl::kernels::curve_parallel(big, 2001); }, 3);

  const auto consec = tl::StructureExpr::consecutive(6, 4000);
  row("curve (consec 6/4000, 201)",
      [&] { return tl::kernels::curve_serial(consec, 201); },
      [&] { return tl::kernels::curve_parallel(consec, 201); }, 3);

  const tl::kernels::BatchPlan plan{7, 0, 256, 1024};
  const auto mc = tl::majority(101);
  row("mc_count (maj101, 262144)",
      [&] { return tl::kernels::mc_count_serial(mc, 0.5, plan); },
      [&] { return tl::kernels::mc_count_parallel(mc, 0.5, plan); }, 3);
  return 0;
}
