#ifndef PERCBRIDGE_ENSEMBLE_HPP
#define PERCBRIDGE_ENSEMBLE_HPP

#include "percbridge/bridge_tables.hpp"
#include "percbridge/perc_sample.hpp"
#include "percbridge/pinning.hpp"
#include "percbridge/summary_stats.hpp"

#include <cstdint>

namespace percbridge {

/// Execution mode of the ensemble kernels. `serial` is the reference
/// implementation; `parallel` runs the same sharded loop under OpenMP.
/// Results are identical in both modes: sample i always consumes RNG stream
/// (seed, i) and shard partials are merged in index order.
enum class ExecMode { serial, parallel };

struct EnsembleOptions {
    uint64_t samples = 0;         // end of the sample index range
    uint64_t sample_begin = 0;    // start of the range; nonzero for shard runs
    uint64_t seed = 0;
    VecD grid;                    // empty: the default 16-point grid
    bool retain_raw = true;
    ExecMode mode = ExecMode::parallel;
    uint64_t shard_size = 4096;   // fixed block size; independent of thread count
};

/// Monte Carlo ensemble of exact-sampler bridges, reduced to SummaryStats.
SummaryStats run_bridge_ensemble(const BridgeTables<double>& tables,
                                 const EnsembleOptions& options);

struct PinnedEnsembleResult {
    SummaryStats stats;                    // gamma-scaled transverse coordinates
    std::map<int64_t, uint64_t> k_hist;    // sampled pinning times
    std::vector<double> time_deviations;   // per sample, index order
};

/// Ensemble of free-pinned bridges (k random, then an exact k-step bridge),
/// reduced to skeleton-scaled statistics.
PinnedEnsembleResult run_pinned_ensemble(const FreePinnedBridgeSampler& sampler,
                                         const EnsembleOptions& options);

struct ClusterSampleRecord {
    uint64_t attempts = 0;
    int64_t regeneration_count = 0; // endpoint included
    double deviation = 0.0;
    double max_gap = 0.0;
};

struct ClusterEnsembleResult {
    SummaryStats gamma_stats;
    std::vector<ClusterSampleRecord> records;          // sample order
    std::vector<std::vector<VecD>> increment_sequences; // per sample, full increments
    std::vector<std::vector<Point>> skeletons;          // per sample
    uint64_t total_attempts = 0;
    double acceptance_rate = 0.0;
    uint64_t gamma_endpoint_violations = 0;
};

struct ClusterEnsembleOptions {
    uint64_t samples = 0;
    uint64_t seed = 0;
    uint64_t attempts_per_sample = 100000000;
    VecD grid;
    bool retain_raw = true;
    bool keep_skeletons = false;
    ExecMode mode = ExecMode::parallel;
    uint64_t shard_size = 64;
};

/// Rejection-sampled conditioned clusters with skeleton observables.
ClusterEnsembleResult run_cluster_ensemble(const SlabGeometry& geom, int64_t n, const Point& a,
                                           const ClusterEnsembleOptions& options);

} // namespace percbridge

#endif
