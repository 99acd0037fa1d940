// Wall-clock comparison of the serial reference kernels against the OpenMP
// ones. Both paths produce identical statistics (asserted here as well).

#include "percbridge/ensemble.hpp"
#include "percbridge/experiments.hpp"

#include <chrono>
#include <cstdio>

#include <omp.h>

using namespace percbridge;

namespace {

template <class Fn>
double time_ms(Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

bool stats_equal(const SummaryStats& a, const SummaryStats& b) {
    if (a.count() != b.count()) return false;
    for (size_t t = 0; t < a.grid().size(); ++t)
        for (int c = 0; c < a.value_dim(); ++c)
            if (a.sum(t, c) != b.sum(t, c) || a.sum2(t, c) != b.sum2(t, c)) return false;
    return true;
}

} // namespace

int main() {
    std::printf("threads available: %d\n\n", omp_get_max_threads());

    {
        StepLaw law = resolve_law("pm1");
        BridgeTables<double> tables(law, 400, {0});
        EnsembleOptions opts;
        opts.samples = 40000;
        opts.seed = 7;
        opts.retain_raw = false;

        SummaryStats serial_stats(SummaryStats::default_grid(), 1, false);
        SummaryStats parallel_stats(SummaryStats::default_grid(), 1, false);
        opts.mode = ExecMode::serial;
        double t_serial = time_ms([&] { serial_stats = run_bridge_ensemble(tables, opts); });
        opts.mode = ExecMode::parallel;
        double t_parallel = time_ms([&] { parallel_stats = run_bridge_ensemble(tables, opts); });
        std::printf("bridge ensemble (n=400, 4e4 samples): serial %.0f ms, parallel %.0f ms, "
                    "speedup %.2fx, identical=%s\n",
                    t_serial, t_parallel, t_serial / t_parallel,
                    stats_equal(serial_stats, parallel_stats) ? "yes" : "NO");
    }

    {
        Point a{1, 0};
        SlabSpec spec = SlabSpec::make(2, 0.45, a, {0, 0}, {8, 0}, 8);
        SlabGeometry geom(spec);
        ClusterEnsembleOptions opts;
        opts.samples = 400;
        opts.seed = 11;
        opts.retain_raw = false;

        ClusterEnsembleResult serial_res, parallel_res;
        opts.mode = ExecMode::serial;
        double t_serial = time_ms([&] { serial_res = run_cluster_ensemble(geom, 8, a, opts); });
        opts.mode = ExecMode::parallel;
        double t_parallel =
            time_ms([&] { parallel_res = run_cluster_ensemble(geom, 8, a, opts); });
        std::printf("conditioned clusters (n=8, 400 samples): serial %.0f ms, parallel %.0f ms, "
                    "speedup %.2fx, identical=%s\n",
                    t_serial, t_parallel, t_serial / t_parallel,
                    stats_equal(serial_res.gamma_stats, parallel_res.gamma_stats) ? "yes"
                                                                                  : "NO");
    }

    return 0;
}
