#include "percbridge/perc_sample.hpp"

#include "percbridge/basis_frame.hpp"

#include <algorithm>
#include <cmath>

namespace percbridge {

ConditionedClusterSampler::ConditionedClusterSampler(const SlabGeometry& geom)
    : geom_(&geom),
      xid_(geom.require_vertex(geom.spec().x)),
      yid_(geom.require_vertex(geom.spec().y)),
      xe_id_(geom.vertex_id(add(geom.spec().x, geom.spec().e))),
      ye_id_(geom.vertex_id(sub(geom.spec().y, geom.spec().e))),
      edge_gen_(static_cast<size_t>(geom.edge_count()), 0),
      vert_gen_(static_cast<size_t>(geom.vertex_count()), 0) {
    edge_open_.resize(static_cast<size_t>(geom.edge_count()), 0);
    require(xid_ != yid_, Errc::invalid_argument,
            "conditioned sampling needs distinct endpoints");
}

bool ConditionedClusterSampler::attempt(Rng& rng) {
    const SlabGeometry& g = *geom_;
    const double p = g.spec().p;
    ++gen_;
    queue_.clear();
    cluster_.clear();

    vert_gen_[static_cast<size_t>(xid_)] = gen_;
    queue_.push_back(xid_);
    size_t head = 0;
    while (head < queue_.size()) {
        int64_t v = queue_[head++];
        cluster_.push_back(v);
        for (const auto& [nb, eid] : g.neighbors(v)) {
            if (edge_gen_[static_cast<size_t>(eid)] != gen_) {
                edge_gen_[static_cast<size_t>(eid)] = gen_;
                edge_open_[static_cast<size_t>(eid)] = rng.bernoulli(p) ? 1 : 0;
            }
            if (!edge_open_[static_cast<size_t>(eid)]) continue;
            if (vert_gen_[static_cast<size_t>(nb)] == gen_) continue;
            vert_gen_[static_cast<size_t>(nb)] = gen_;
            queue_.push_back(nb);
        }
    }
    if (vert_gen_[static_cast<size_t>(yid_)] != gen_) return false;
    if (!xe_id_ || !ye_id_) return false;

    const int64_t lo = g.rdot(xid_), hi = g.rdot(yid_);
    const int64_t re = g.r_dot_e();
    bool has_xe = false, has_ye = false;
    for (int64_t v : cluster_) {
        int64_t rz = g.rdot(v);
        if (rz <= lo + re) {
            if (v != xid_ && v != *xe_id_) return false;
            if (v == *xe_id_) has_xe = true;
        }
        if (rz >= hi - re) {
            if (v != yid_ && v != *ye_id_) return false;
            if (v == *ye_id_) has_ye = true;
        }
    }
    return has_xe && has_ye;
}

ConditionedSample ConditionedClusterSampler::sample(Rng& rng, uint64_t max_attempts) {
    const SlabGeometry& g = *geom_;
    for (uint64_t attempts = 1; attempts <= max_attempts; ++attempts) {
        if (!attempt(rng)) continue;

        ConditionedSample out{BondConfiguration(g), ClusterView{}, RegenerationSkeleton{},
                              attempts};
        // realize the full configuration: explored edges keep their states,
        // the rest are filled independently (they do not affect the event)
        for (int64_t eid = 0; eid < g.edge_count(); ++eid) {
            bool open = edge_gen_[static_cast<size_t>(eid)] == gen_
                            ? edge_open_[static_cast<size_t>(eid)] != 0
                            : rng.bernoulli(g.spec().p);
            out.config.set_open(eid, open);
        }
        std::sort(cluster_.begin(), cluster_.end());
        out.cluster.vertices = cluster_;
        out.cluster.endpoint_x = g.spec().x;
        out.cluster.endpoint_y = g.spec().y;
        for (int64_t eid = 0; eid < g.edge_count(); ++eid) {
            if (!out.config.is_open(eid)) continue;
            const auto& e = g.edges()[static_cast<size_t>(eid)];
            if (out.cluster.contains(e.u) && out.cluster.contains(e.v))
                out.cluster.edges.push_back(eid);
        }
        out.skeleton = find_regeneration_points(g, out.cluster);
        return out;
    }
    fail(Errc::attempt_budget_exhausted,
         "no accepted cluster in " + std::to_string(max_attempts) + " attempts");
}

ConditionedSample sample_conditioned_cluster(const SlabGeometry& geom, Rng& rng,
                                             uint64_t max_attempts) {
    ConditionedClusterSampler sampler(geom);
    return sampler.sample(rng, max_attempts);
}

namespace {

std::vector<std::pair<double, VecD>> frame_points(const RegenerationSkeleton& skeleton,
                                                  const BasisFrame& frame) {
    std::vector<std::pair<double, VecD>> pts;
    pts.reserve(skeleton.points.size());
    for (const auto& z : skeleton.points) {
        VecD coords = frame.to_frame(z);
        VecD y(coords.begin() + 1, coords.end());
        for (auto& c : y)
            if (std::abs(c) < 1e-12) c = 0.0;
        pts.emplace_back(coords[0], std::move(y));
    }
    return pts;
}

double point_segment_distance(const VecD& p, const VecD& a, const VecD& b) {
    VecD ab(a.size()), ap(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        ab[i] = b[i] - a[i];
        ap[i] = p[i] - a[i];
    }
    double denom = dot(ab, ab);
    double t = denom > 0 ? std::clamp(dot(ap, ab) / denom, 0.0, 1.0) : 0.0;
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = ap[i] - t * ab[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace

ScaledPath skeleton_gamma(const RegenerationSkeleton& skeleton, int64_t n, const Point& a) {
    BasisFrame frame(a);
    return skeleton_scale(frame_points(skeleton, frame), n, a);
}

double cluster_deviation(const SlabGeometry& geom, const ClusterView& cluster,
                         const RegenerationSkeleton& skeleton, int64_t n, const Point& a) {
    BasisFrame frame(a);
    const double na = static_cast<double>(n) * norm2(a);
    const double root = std::sqrt(static_cast<double>(n));
    const int d = frame.dim();

    auto scaled = [&](const Point& z) {
        VecD coords = frame.to_frame(z);
        coords[0] /= na;
        for (int c = 1; c < d; ++c) coords[static_cast<size_t>(c)] /= root;
        return coords;
    };

    std::vector<VecD> knots;
    knots.push_back(scaled(cluster.endpoint_x));
    for (const auto& z : skeleton.points) knots.push_back(scaled(z));

    double worst = 0.0;
    for (int64_t vid : cluster.vertices) {
        VecD pt = scaled(geom.vertex(vid));
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i + 1 < knots.size(); ++i)
            best = std::min(best, point_segment_distance(pt, knots[i], knots[i + 1]));
        if (knots.size() == 1) best = point_segment_distance(pt, knots[0], knots[0]);
        worst = std::max(worst, best);
    }
    return worst;
}

double max_regeneration_gap(const RegenerationSkeleton& skeleton, const Point& origin) {
    double worst = 0.0;
    Point prev = origin;
    for (const auto& z : skeleton.points) {
        worst = std::max(worst, norm2(sub(z, prev)));
        prev = z;
    }
    return worst;
}

} // namespace percbridge
