#include "percbridge/ensemble.hpp"

#include "percbridge/basis_frame.hpp"

#include <cmath>

namespace percbridge {

namespace {

VecD grid_or_default(const VecD& grid) {
    return grid.empty() ? SummaryStats::default_grid() : grid;
}

// shard blocks at absolute multiples of shard_size, so any block-aligned
// partition of the index range reduces in the same floating-point order
struct ShardRange {
    int64_t first, last; // shard ids, inclusive
    uint64_t begin, end, size;
};

ShardRange shard_range(const EnsembleOptions& options) {
    require(options.samples > options.sample_begin, Errc::invalid_argument,
            "empty sample range");
    ShardRange r;
    r.begin = options.sample_begin;
    r.end = options.samples;
    r.size = options.shard_size;
    r.first = static_cast<int64_t>(r.begin / r.size);
    r.last = static_cast<int64_t>((r.end - 1) / r.size);
    return r;
}

} // namespace

SummaryStats run_bridge_ensemble(const BridgeTables<double>& tables,
                                 const EnsembleOptions& options) {
    const ShardRange range = shard_range(options);
    const VecD grid = grid_or_default(options.grid);
    const int vd = tables.law().dim();
    const int64_t shards = range.last - range.first + 1;
    std::vector<SummaryStats> partials(static_cast<size_t>(shards),
                                       SummaryStats(grid, vd, options.retain_raw));
    const bool parallel = options.mode == ExecMode::parallel;

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int64_t sh = 0; sh < shards; ++sh) {
        uint64_t lo = std::max(range.begin,
                               static_cast<uint64_t>(range.first + sh) * range.size);
        uint64_t hi = std::min(range.end,
                               (static_cast<uint64_t>(range.first + sh) + 1) * range.size);
        SummaryStats& local = partials[static_cast<size_t>(sh)];
        for (uint64_t i = lo; i < hi; ++i) {
            Rng rng = Rng::stream(options.seed, i);
            BridgePath path = tables.sample(rng);
            local.add_path(interpolate_scale(path, tables.steps()));
        }
    }

    SummaryStats out = std::move(partials.front());
    for (size_t sh = 1; sh < partials.size(); ++sh) out.merge(partials[sh]);
    return out;
}

PinnedEnsembleResult run_pinned_ensemble(const FreePinnedBridgeSampler& sampler,
                                         const EnsembleOptions& options) {
    const ShardRange range = shard_range(options);
    const VecD grid = grid_or_default(options.grid);
    const StepLaw& law = sampler.law();
    const int vd = std::max(1, law.dim() - 1);
    const Point a = sampler.pinning().a;
    const int64_t n = sampler.pinning().n;
    BasisFrame frame(a);
    const int64_t shards = range.last - range.first + 1;

    struct Partial {
        SummaryStats stats;
        std::map<int64_t, uint64_t> k_hist;
        std::vector<double> deviations;
    };
    std::vector<Partial> partials;
    partials.reserve(static_cast<size_t>(shards));
    for (int64_t sh = 0; sh < shards; ++sh)
        partials.push_back({SummaryStats(grid, vd, options.retain_raw), {}, {}});
    const bool parallel = options.mode == ExecMode::parallel;

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int64_t sh = 0; sh < shards; ++sh) {
        uint64_t lo = std::max(range.begin,
                               static_cast<uint64_t>(range.first + sh) * range.size);
        uint64_t hi = std::min(range.end,
                               (static_cast<uint64_t>(range.first + sh) + 1) * range.size);
        Partial& local = partials[static_cast<size_t>(sh)];
        for (uint64_t i = lo; i < hi; ++i) {
            Rng rng = Rng::stream(options.seed, i);
            auto [k, path] = sampler.sample(rng);
            ++local.k_hist[k];
            local.deviations.push_back(time_deviation(path, n, a));
            if (law.dim() >= 2) {
                std::vector<std::pair<double, VecD>> pts;
                pts.reserve(path.points.size() - 1);
                for (size_t j = 1; j < path.points.size(); ++j) {
                    VecD coords = frame.to_frame(path.points[j]);
                    VecD y(coords.begin() + 1, coords.end());
                    for (auto& c : y)
                        if (std::abs(c) < 1e-12) c = 0.0;
                    pts.emplace_back(coords[0], std::move(y));
                }
                local.stats.add_path(skeleton_scale(pts, n, a));
            } else {
                // 1-d: only the time axis exists; record nothing transverse
                std::vector<VecD> zeros(grid.size(), VecD(1, 0.0));
                local.stats.add_grid_values(zeros, 0.0);
            }
        }
    }

    PinnedEnsembleResult out{std::move(partials.front().stats),
                             std::move(partials.front().k_hist),
                             std::move(partials.front().deviations)};
    for (size_t sh = 1; sh < partials.size(); ++sh) {
        out.stats.merge(partials[sh].stats);
        for (const auto& [k, c] : partials[sh].k_hist) out.k_hist[k] += c;
        out.time_deviations.insert(out.time_deviations.end(),
                                   partials[sh].deviations.begin(),
                                   partials[sh].deviations.end());
    }
    return out;
}

ClusterEnsembleResult run_cluster_ensemble(const SlabGeometry& geom, int64_t n, const Point& a,
                                           const ClusterEnsembleOptions& options) {
    require(options.samples >= 1, Errc::invalid_argument, "need at least one sample");
    const VecD grid = grid_or_default(options.grid);
    const int vd = std::max(1, geom.spec().dim - 1);
    BasisFrame frame(a);
    const int64_t shards = static_cast<int64_t>((options.samples + options.shard_size - 1) /
                                                options.shard_size);

    struct Partial {
        SummaryStats stats;
        std::vector<ClusterSampleRecord> records;
        std::vector<std::vector<VecD>> increments;
        std::vector<std::vector<Point>> skeletons;
        uint64_t endpoint_violations = 0;
    };
    std::vector<Partial> partials;
    partials.reserve(static_cast<size_t>(shards));
    for (int64_t sh = 0; sh < shards; ++sh)
        partials.push_back({SummaryStats(grid, vd, options.retain_raw), {}, {}, {}, 0});
    const bool parallel = options.mode == ExecMode::parallel;

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int64_t sh = 0; sh < shards; ++sh) {
        uint64_t lo = static_cast<uint64_t>(sh) * options.shard_size;
        uint64_t hi = std::min(options.samples, lo + options.shard_size);
        Partial& local = partials[static_cast<size_t>(sh)];
        ConditionedClusterSampler sampler(geom);
        for (uint64_t i = lo; i < hi; ++i) {
            Rng rng = Rng::stream(options.seed, i);
            ConditionedSample sample = sampler.sample(rng, options.attempts_per_sample);

            ScaledPath gamma = skeleton_gamma(sample.skeleton, n, a);
            for (double c : gamma.values().back())
                if (c != 0.0) ++local.endpoint_violations;
            local.stats.add_path(gamma);

            ClusterSampleRecord rec;
            rec.attempts = sample.attempts;
            rec.regeneration_count = static_cast<int64_t>(sample.skeleton.points.size());
            rec.deviation = cluster_deviation(geom, sample.cluster, sample.skeleton, n, a);
            rec.max_gap = max_regeneration_gap(sample.skeleton, geom.spec().x);
            local.records.push_back(rec);

            std::vector<VecD> incs;
            for (const auto& inc : sample.skeleton.increments(geom.spec().x)) {
                local.stats.add_increment_norm(norm2(inc));
                incs.push_back(to_vecd(inc));
            }
            local.increments.push_back(std::move(incs));
            if (options.keep_skeletons) local.skeletons.push_back(sample.skeleton.points);
        }
    }

    ClusterEnsembleResult out;
    out.gamma_stats = std::move(partials.front().stats);
    out.records = std::move(partials.front().records);
    out.increment_sequences = std::move(partials.front().increments);
    out.skeletons = std::move(partials.front().skeletons);
    out.gamma_endpoint_violations = partials.front().endpoint_violations;
    for (size_t sh = 1; sh < partials.size(); ++sh) {
        out.gamma_stats.merge(partials[sh].stats);
        out.records.insert(out.records.end(), partials[sh].records.begin(),
                           partials[sh].records.end());
        out.increment_sequences.insert(out.increment_sequences.end(),
                                       partials[sh].increments.begin(),
                                       partials[sh].increments.end());
        out.skeletons.insert(out.skeletons.end(), partials[sh].skeletons.begin(),
                             partials[sh].skeletons.end());
        out.gamma_endpoint_violations += partials[sh].endpoint_violations;
    }
    for (const auto& rec : out.records) out.total_attempts += rec.attempts;
    out.acceptance_rate =
        static_cast<double>(out.records.size()) / static_cast<double>(out.total_attempts);
    return out;
}

} // namespace percbridge
