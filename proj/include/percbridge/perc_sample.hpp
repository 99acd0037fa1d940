#ifndef PERCBRIDGE_PERC_SAMPLE_HPP
#define PERCBRIDGE_PERC_SAMPLE_HPP

#include "percbridge/percolation.hpp"
#include "percbridge/scaled_path.hpp"

#include <cstdint>

namespace percbridge {

struct ConditionedSample {
    BondConfiguration config;
    ClusterView cluster;
    RegenerationSkeleton skeleton;
    uint64_t attempts = 0;
};

/// Rejection sampler for the cluster conditioned on {x <-h-> y}. Edge states
/// are drawn lazily while growing the cluster of x, which keeps the per-attempt
/// cost proportional to the cluster size; unexplored edges are filled in after
/// acceptance, so the returned configuration is an exact conditional sample.
/// Reusable across attempts; one instance per thread.
class ConditionedClusterSampler {
  public:
    explicit ConditionedClusterSampler(const SlabGeometry& geom);

    // Errors: AttemptBudgetExhausted.
    ConditionedSample sample(Rng& rng, uint64_t max_attempts);

    const SlabGeometry& geometry() const { return *geom_; }

  private:
    bool attempt(Rng& rng);

    const SlabGeometry* geom_;
    int64_t xid_, yid_;
    std::optional<int64_t> xe_id_, ye_id_;
    std::vector<uint32_t> edge_gen_, vert_gen_;
    std::vector<uint8_t> edge_open_;
    std::vector<int64_t> queue_;
    std::vector<int64_t> cluster_;
    uint32_t gen_ = 0;
};

ConditionedSample sample_conditioned_cluster(const SlabGeometry& geom, Rng& rng,
                                             uint64_t max_attempts);

// gamma: transverse frame coordinates of the scaled interpolation of the
// regeneration points, pinned at 0 on both ends.
ScaledPath skeleton_gamma(const RegenerationSkeleton& skeleton, int64_t n, const Point& a);

// Max over scaled cluster vertices of the distance to the scaled skeleton
// polyline in [0,1] x R^{d-1}.
double cluster_deviation(const SlabGeometry& geom, const ClusterView& cluster,
                         const RegenerationSkeleton& skeleton, int64_t n, const Point& a);

// Largest Euclidean increment between consecutive regeneration points
// (origin prepended).
double max_regeneration_gap(const RegenerationSkeleton& skeleton, const Point& origin);

} // namespace percbridge

#endif
