// Benchmark comparing the OpenMP kernels against their serial references:
// Monte Carlo exit sampling and the pure-threshold grid sweep.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stoplaw/optimize.hpp"
#include "stoplaw/simulate.hpp"

using namespace stoplaw;

namespace {

double time_of(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DiffusionSpec brownian(double y) {
    DiffusionSpec s;
    s.drift = {CoefSpec::Kind::constant, 0.0, {}};
    s.vol = {CoefSpec::Kind::constant, 1.0, {}};
    s.lo = 0.0;
    s.hi = kInf;
    s.start = y;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    const bool smoke = argc > 1 && std::strcmp(argv[1], "--smoke") == 0;
    const long paths = smoke ? 4000 : 100000;
    const int grid_n = smoke ? 60 : 220;

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("threads: %d, paths: %ld, grid: %dx%d\n", threads, paths, grid_n, grid_n);

    const DiffusionSpec spec = brownian(1.0);
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.paths = paths;
    cfg.seed = 2024;

    SimResult serial_res, parallel_res;
    cfg.parallel = false;
    const double t_serial = time_of([&] {
        serial_res = run_threshold(spec, {0.0, 2.0, 1.0}, cfg);
    });
    cfg.parallel = true;
    const double t_parallel = time_of([&] {
        parallel_res = run_threshold(spec, {0.0, 2.0, 1.0}, cfg);
    });
    bool identical = serial_res.law.samples == parallel_res.law.samples &&
                     serial_res.law.censored == parallel_res.law.censored;
    std::printf("paths   serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n",
                t_serial, t_parallel, t_serial / t_parallel,
                identical ? "bit-identical" : "MISMATCH");

    const ScaleMap scale = ScaleMap::identity(0.0, 4.0, 1.0);
    const ThresholdGrid grid = ThresholdGrid::regular(scale.image(), 1.0, grid_n, grid_n);
    const Objective obj = Objective::make_csc(
        {Utility::piecewise_linear({{0.0, 0.0}, {0.05, 0.05}, {2.9, 1.475}, {4.0, 2.575}}),
         Utility::piecewise_linear({{0.0, 0.0}, {0.65, 0.325}, {1.65, 1.325}, {4.0, 2.5}})});
    OptimReport r_serial, r_parallel;
    const double g_serial = time_of([&] {
        r_serial = optimize_pure_thresholds(obj, grid, scale, Execution::serial);
    });
    const double g_parallel = time_of([&] {
        r_parallel = optimize_pure_thresholds(obj, grid, scale, Execution::parallel);
    });
    const bool same = r_serial.value == r_parallel.value &&
                      r_serial.best_pair->a == r_parallel.best_pair->a &&
                      r_serial.best_pair->b == r_parallel.best_pair->b;
    std::printf("sweep   serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n",
                g_serial, g_parallel, g_serial / g_parallel,
                same ? "bit-identical" : "MISMATCH");

    return identical && same ? 0 : 1;
}
