#ifndef PERCBRIDGE_PERCOLATION_HPP
#define PERCBRIDGE_PERCOLATION_HPP

#include "percbridge/errors.hpp"
#include "percbridge/point.hpp"
#include "percbridge/rational.hpp"
#include "percbridge/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

namespace percbridge {

/// Truncated slab S^r_{x,y}: lattice points with r.x <= r.z <= r.y whose
/// transverse displacement from the r-axis is at most W in max-norm.
struct SlabSpec {
    int dim = 2;
    double p = 0.0;
    std::optional<Rational> p_exact;
    Point r; // slab direction (integer, nonzero)
    Point x; // bottom endpoint
    Point y; // top endpoint
    int64_t width = 0;
    bool allow_supercritical = false;
    bool supercritical_override = false; // set when the p < 1/2 guard was waived
    Point e; // derived: basis vector with maximal e.r; ties -> lowest index

    static SlabSpec make(int dim, double p, Point r, Point x, Point y, int64_t width,
                         bool allow_supercritical = false);
    static SlabSpec make_exact(int dim, Rational p, Point r, Point x, Point y, int64_t width,
                               bool allow_supercritical = false);

    SlabSpec with_endpoints(Point new_x, Point new_y) const;
};

/// Finite vertex/edge indexing of a truncated slab. Immutable once built.
class SlabGeometry {
  public:
    struct Edge {
        int64_t u, v; // vertex ids, u < v
        int axis;     // coordinate axis of the edge direction
    };

    explicit SlabGeometry(SlabSpec spec);

    const SlabSpec& spec() const { return spec_; }
    int64_t vertex_count() const { return static_cast<int64_t>(vertices_.size()); }
    int64_t edge_count() const { return static_cast<int64_t>(edges_.size()); }
    const Point& vertex(int64_t id) const { return vertices_[static_cast<size_t>(id)]; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::optional<int64_t> vertex_id(const Point& z) const;
    int64_t require_vertex(const Point& z) const;
    // (neighbor vertex, edge id) pairs in a fixed deterministic order
    const std::vector<std::pair<int64_t, int64_t>>& neighbors(int64_t vid) const {
        return adjacency_[static_cast<size_t>(vid)];
    }
    int64_t rdot(int64_t vid) const { return rdots_[static_cast<size_t>(vid)]; }
    int64_t rdot_point(const Point& z) const { return dot(z, spec_.r); }
    // edges at vid along axes other than the axis of e (present in the truncation)
    const std::vector<int64_t>& perp_edges(int64_t vid) const {
        return perp_edges_[static_cast<size_t>(vid)];
    }
    int64_t r_dot_e() const { return re_; }

    // sub-slab between u and v (same direction, width and probability)
    SlabGeometry band_subgeometry(const Point& u, const Point& v) const {
        return SlabGeometry(spec_.with_endpoints(u, v));
    }

  private:
    SlabSpec spec_;
    std::vector<Point> vertices_; // sorted lexicographically
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int64_t, int64_t>>> adjacency_;
    std::vector<std::vector<int64_t>> perp_edges_;
    std::vector<int64_t> rdots_;
    std::unordered_map<Point, int64_t, PointHash> index_;
    int64_t re_ = 0;
    int e_axis_ = 0;
};

/// Open/closed states for every edge of a slab geometry.
class BondConfiguration {
  public:
    explicit BondConfiguration(const SlabGeometry& geom)
        : geom_(&geom), open_(static_cast<size_t>(geom.edge_count()), 0) {}

    const SlabGeometry& geometry() const { return *geom_; }
    bool is_open(int64_t edge) const { return open_[static_cast<size_t>(edge)] != 0; }
    void set_open(int64_t edge, bool open) { open_[static_cast<size_t>(edge)] = open ? 1 : 0; }
    uint64_t open_count() const;

    // edge list serialization: "x1 y1 ... x2 y2 ... open|closed" per line
    void serialize(std::ostream& out) const;
    static BondConfiguration deserialize(const SlabGeometry& geom, std::istream& in);

  private:
    const SlabGeometry* geom_;
    std::vector<uint8_t> open_;
};

/// Common open cluster of two pinned vertices, restricted to their band.
struct ClusterView {
    std::vector<int64_t> vertices; // sorted ids
    std::vector<int64_t> edges;    // open edges inside the cluster, sorted
    Point endpoint_x, endpoint_y;

    bool contains(int64_t vid) const;
};

/// Ordered regeneration points; the conditioning endpoint is always the last.
struct RegenerationSkeleton {
    std::vector<Point> points;

    // increments x_i relative to the given origin
    std::vector<Point> increments(const Point& origin) const;
};

// Each in-slab edge open independently with probability p.
BondConfiguration sample_configuration(const SlabGeometry& geom, Rng& rng);

// Cluster containing both x and y in the restriction to S_{x,y}, or absent.
std::optional<ClusterView> common_cluster(const SlabGeometry& geom,
                                          const BondConfiguration& config, const Point& x,
                                          const Point& y);

// h-connectivity of x and y inside S_{x,y}: connected, with single-bond entry
// and exit through x+e and y-e; for x == y, all perpendicular edges closed.
bool is_h_connected(const SlabGeometry& geom, const BondConfiguration& config, const Point& x,
                    const Point& y);

// irreducible h-connection: no intermediate z splits it into two h-connections
bool is_f_connected(const SlabGeometry& geom, const BondConfiguration& config, const Point& x,
                    const Point& y);

// All regeneration points of a cluster conditioned on {x <-h-> y}, in
// increasing r order, with y appended. Errors: NotHConnected.
RegenerationSkeleton find_regeneration_points(const SlabGeometry& geom,
                                              const ClusterView& cluster);

// consecutive skeleton pieces are f-connected in their sub-band restriction
bool skeleton_pieces_f_connected(const SlabGeometry& geom, const BondConfiguration& config,
                                 const ClusterView& cluster,
                                 const RegenerationSkeleton& skeleton);

} // namespace percbridge

#endif
