// Compares the OpenMP kernels against their serial references and reports
// wall-clock speedup. Both paths must produce identical results.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "funnelrs/hurst.hpp"
#include "funnelrs/markov.hpp"

using namespace funnelrs;
using clk = std::chrono::steady_clock;

namespace {

double seconds(clk::time_point a, clk::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int scale = argc > 1 ? std::atoi(argv[1]) : 1;

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif

  {
    std::vector<std::int64_t> sizes;
    for (std::int64_t n = 100; n <= 1000000; n *= 10) sizes.push_back(n);
    const int reps = 30 * scale;

    auto t0 = clk::now();
    const auto serial = funnel_simulation_serial({0.83, 0.83}, sizes, reps, 1);
    auto t1 = clk::now();
    const auto parallel = funnel_simulation({0.83, 0.83}, sizes, reps, 1);
    auto t2 = clk::now();

    bool same = serial.size() == parallel.size();
    for (std::size_t i = 0; same && i < serial.size(); ++i)
      same = serial[i].proportion == parallel[i].proportion;
    const double ts = seconds(t0, t1), tp = seconds(t1, t2);
    std::printf("funnel_simulation   serial %.3fs  parallel %.3fs  speedup %.2fx  %s\n",
                ts, tp, ts / tp, same ? "identical" : "MISMATCH");
    if (!same) return 1;
  }

  {
    const auto series = generate_fgn(0.8, 8192, 7);
    const int shuffles = 40 * scale;

    auto t0 = clk::now();
    const auto serial = randomized_baseline_serial(series, shuffles, 2);
    auto t1 = clk::now();
    const auto parallel = randomized_baseline(series, shuffles, 2);
    auto t2 = clk::now();

    const bool same = serial.h_values == parallel.h_values;
    const double ts = seconds(t0, t1), tp = seconds(t1, t2);
    std::printf("randomized_baseline serial %.3fs  parallel %.3fs  speedup %.2fx  %s\n",
                ts, tp, ts / tp, same ? "identical" : "MISMATCH");
    if (!same) return 1;
  }

  return 0;
}
