#include "percbridge/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace percbridge {

namespace {

Point derive_e(const Point& r) {
    int best_axis = -1;
    int64_t best = -1;
    for (size_t c = 0; c < r.size(); ++c) {
        int64_t v = std::abs(r[c]);
        if (v > best) {
            best = v;
            best_axis = static_cast<int>(c);
        }
    }
    Point e(r.size(), 0);
    e[static_cast<size_t>(best_axis)] = r[static_cast<size_t>(best_axis)] >= 0 ? 1 : -1;
    return e;
}

void validate_spec(const SlabSpec& s) {
    require(s.dim >= 2, Errc::invalid_argument, "percolation needs dim >= 2");
    require(s.p > 0.0 && s.p < 1.0, Errc::invalid_argument, "p must be in (0,1)");
    require(static_cast<int>(s.r.size()) == s.dim && !is_zero(s.r), Errc::invalid_argument,
            "slab direction must be a nonzero integer vector");
    require(static_cast<int>(s.x.size()) == s.dim && static_cast<int>(s.y.size()) == s.dim,
            Errc::dimension_mismatch, "endpoint dimension mismatch");
    require(dot(s.y, s.r) >= dot(s.x, s.r), Errc::invalid_argument,
            "slab is empty: r.y < r.x");
    require(s.width >= 0, Errc::invalid_argument, "width must be >= 0");
    if (s.dim == 2 && s.p >= 0.5)
        require(s.allow_supercritical, Errc::supercritical_p,
                "p >= 1/2 is not subcritical for d=2 bond percolation");
}

} // namespace

SlabSpec SlabSpec::make(int dim, double p, Point r, Point x, Point y, int64_t width,
                        bool allow_supercritical) {
    SlabSpec s;
    s.dim = dim;
    s.p = p;
    s.r = std::move(r);
    s.x = std::move(x);
    s.y = std::move(y);
    s.width = width;
    s.allow_supercritical = allow_supercritical;
    validate_spec(s);
    s.supercritical_override = (dim == 2 && p >= 0.5);
    s.e = derive_e(s.r);
    return s;
}

SlabSpec SlabSpec::make_exact(int dim, Rational p, Point r, Point x, Point y, int64_t width,
                              bool allow_supercritical) {
    SlabSpec s = make(dim, to_double(p), std::move(r), std::move(x), std::move(y), width,
                      allow_supercritical);
    s.p_exact = std::move(p);
    return s;
}

SlabSpec SlabSpec::with_endpoints(Point new_x, Point new_y) const {
    SlabSpec s(*this);
    s.x = std::move(new_x);
    s.y = std::move(new_y);
    validate_spec(s);
    return s;
}

SlabGeometry::SlabGeometry(SlabSpec spec) : spec_(std::move(spec)) {
    const int d = spec_.dim;
    const int64_t lo = dot(spec_.x, spec_.r);
    const int64_t hi = dot(spec_.y, spec_.r);
    const double rr = static_cast<double>(dot(spec_.r, spec_.r));

    for (size_t c = 0; c < spec_.e.size(); ++c)
        if (spec_.e[c] != 0) e_axis_ = static_cast<int>(c);
    re_ = dot(spec_.e, spec_.r);

    // conservative per-axis bounding box: |z_c| <= |r.z| |r_c|/|r|^2 + W + 1
    const double band = std::max(std::abs(static_cast<double>(lo)),
                                 std::abs(static_cast<double>(hi)));
    Point bound(d, 0);
    for (int c = 0; c < d; ++c)
        bound[static_cast<size_t>(c)] = static_cast<int64_t>(
            std::ceil(band * std::abs(static_cast<double>(spec_.r[static_cast<size_t>(c)])) / rr +
                      static_cast<double>(spec_.width) + 1.0));

    auto in_slab = [&](const Point& z) {
        int64_t rz = dot(z, spec_.r);
        if (rz < lo || rz > hi) return false;
        double t = static_cast<double>(rz) / rr;
        for (int c = 0; c < d; ++c) {
            double perp = static_cast<double>(z[static_cast<size_t>(c)]) -
                          t * static_cast<double>(spec_.r[static_cast<size_t>(c)]);
            if (std::abs(perp) > static_cast<double>(spec_.width) + 1e-9) return false;
        }
        return true;
    };

    // enumerate the box in lexicographic order
    Point z(d);
    for (int c = 0; c < d; ++c) z[static_cast<size_t>(c)] = -bound[static_cast<size_t>(c)];
    while (true) {
        if (in_slab(z)) vertices_.push_back(z);
        int c = d - 1;
        while (c >= 0) {
            if (++z[static_cast<size_t>(c)] <= bound[static_cast<size_t>(c)]) break;
            z[static_cast<size_t>(c)] = -bound[static_cast<size_t>(c)];
            --c;
        }
        if (c < 0) break;
    }
    for (size_t i = 0; i < vertices_.size(); ++i)
        index_.emplace(vertices_[i], static_cast<int64_t>(i));
    rdots_.resize(vertices_.size());
    for (size_t i = 0; i < vertices_.size(); ++i) rdots_[i] = dot(vertices_[i], spec_.r);

    for (size_t i = 0; i < vertices_.size(); ++i) {
        for (int c = 0; c < d; ++c) {
            Point nb = vertices_[i];
            nb[static_cast<size_t>(c)] += 1;
            auto it = index_.find(nb);
            if (it == index_.end()) continue;
            edges_.push_back({static_cast<int64_t>(i), it->second, c});
        }
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });

    adjacency_.resize(vertices_.size());
    perp_edges_.resize(vertices_.size());
    for (size_t eid = 0; eid < edges_.size(); ++eid) {
        const Edge& e = edges_[eid];
        adjacency_[static_cast<size_t>(e.u)].emplace_back(e.v, static_cast<int64_t>(eid));
        adjacency_[static_cast<size_t>(e.v)].emplace_back(e.u, static_cast<int64_t>(eid));
        if (e.axis != e_axis_) {
            perp_edges_[static_cast<size_t>(e.u)].push_back(static_cast<int64_t>(eid));
            perp_edges_[static_cast<size_t>(e.v)].push_back(static_cast<int64_t>(eid));
        }
    }
}

std::optional<int64_t> SlabGeometry::vertex_id(const Point& z) const {
    auto it = index_.find(z);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int64_t SlabGeometry::require_vertex(const Point& z) const {
    auto id = vertex_id(z);
    require(id.has_value(), Errc::vertex_outside_slab,
            format_point(z) + " is outside the truncated slab");
    return *id;
}

uint64_t BondConfiguration::open_count() const {
    uint64_t n = 0;
    for (auto b : open_) n += b;
    return n;
}

void BondConfiguration::serialize(std::ostream& out) const {
    for (int64_t eid = 0; eid < geom_->edge_count(); ++eid) {
        const auto& e = geom_->edges()[static_cast<size_t>(eid)];
        out << format_point(geom_->vertex(e.u)) << ' ' << format_point(geom_->vertex(e.v))
            << ' ' << (is_open(eid) ? "open" : "closed") << '\n';
    }
}

BondConfiguration BondConfiguration::deserialize(const SlabGeometry& geom, std::istream& in) {
    std::map<std::pair<int64_t, int64_t>, int64_t> lookup;
    for (int64_t eid = 0; eid < geom.edge_count(); ++eid) {
        const auto& e = geom.edges()[static_cast<size_t>(eid)];
        lookup[{e.u, e.v}] = eid;
    }
    BondConfiguration cfg(geom);
    const int d = geom.spec().dim;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        Point a(static_cast<size_t>(d)), b(static_cast<size_t>(d));
        for (auto& c : a) require(static_cast<bool>(ls >> c), Errc::io_error, "bad edge line: " + line);
        for (auto& c : b) require(static_cast<bool>(ls >> c), Errc::io_error, "bad edge line: " + line);
        std::string state;
        require(static_cast<bool>(ls >> state) && (state == "open" || state == "closed"),
                Errc::io_error, "bad edge state in: " + line);
        int64_t ua = geom.require_vertex(a);
        int64_t ub = geom.require_vertex(b);
        if (ua > ub) std::swap(ua, ub);
        auto it = lookup.find({ua, ub});
        require(it != lookup.end(), Errc::io_error, "unknown edge in: " + line);
        cfg.set_open(it->second, state == "open");
    }
    return cfg;
}

bool ClusterView::contains(int64_t vid) const {
    return std::binary_search(vertices.begin(), vertices.end(), vid);
}

std::vector<Point> RegenerationSkeleton::increments(const Point& origin) const {
    std::vector<Point> out;
    Point prev = origin;
    for (const auto& pt : points) {
        out.push_back(sub(pt, prev));
        prev = pt;
    }
    return out;
}

BondConfiguration sample_configuration(const SlabGeometry& geom, Rng& rng) {
    BondConfiguration cfg(geom);
    const double p = geom.spec().p;
    for (int64_t eid = 0; eid < geom.edge_count(); ++eid) cfg.set_open(eid, rng.bernoulli(p));
    return cfg;
}

namespace {

// cluster of `start` over open edges whose endpoints both lie in [lo, hi] r-band
std::vector<int64_t> band_cluster(const SlabGeometry& geom, const BondConfiguration& config,
                                  int64_t start, int64_t lo, int64_t hi) {
    std::vector<uint8_t> seen(static_cast<size_t>(geom.vertex_count()), 0);
    std::deque<int64_t> queue;
    seen[static_cast<size_t>(start)] = 1;
    queue.push_back(start);
    std::vector<int64_t> cluster;
    while (!queue.empty()) {
        int64_t v = queue.front();
        queue.pop_front();
        cluster.push_back(v);
        for (const auto& [nb, eid] : geom.neighbors(v)) {
            if (!config.is_open(eid) || seen[static_cast<size_t>(nb)]) continue;
            int64_t rz = geom.rdot(nb);
            if (rz < lo || rz > hi) continue;
            seen[static_cast<size_t>(nb)] = 1;
            queue.push_back(nb);
        }
    }
    std::sort(cluster.begin(), cluster.end());
    return cluster;
}

struct HCheck {
    bool connected = false;
    std::vector<int64_t> cluster;
};

HCheck h_check(const SlabGeometry& geom, const BondConfiguration& config, int64_t xid,
               int64_t yid) {
    HCheck out;
    const int64_t lo = geom.rdot(xid);
    const int64_t hi = geom.rdot(yid);
    if (hi < lo) return out; // empty slab
    if (xid == yid) {
        for (int64_t eid : geom.perp_edges(xid))
            if (config.is_open(eid)) return out;
        out.connected = true;
        out.cluster = {xid};
        return out;
    }
    auto cluster = band_cluster(geom, config, xid, lo, hi);
    if (!std::binary_search(cluster.begin(), cluster.end(), yid)) return out;

    const int64_t re = geom.r_dot_e();
    const Point& x = geom.vertex(xid);
    const Point& y = geom.vertex(yid);
    auto xe = geom.vertex_id(add(x, geom.spec().e));
    auto ye = geom.vertex_id(sub(y, geom.spec().e));
    if (!xe || !ye) return out;
    bool has_xe = false, has_ye = false;
    // when the two sub-slabs overlap, a vertex in the overlap must satisfy
    // both set conditions at once
    for (int64_t v : cluster) {
        int64_t rz = geom.rdot(v);
        if (rz <= lo + re) {
            if (v != xid && v != *xe) return out;
            if (v == *xe) has_xe = true;
        }
        if (rz >= hi - re) {
            if (v != yid && v != *ye) return out;
            if (v == *ye) has_ye = true;
        }
    }
    if (!has_xe || !has_ye) return out;
    out.connected = true;
    out.cluster = std::move(cluster);
    return out;
}

} // namespace

std::optional<ClusterView> common_cluster(const SlabGeometry& geom,
                                          const BondConfiguration& config, const Point& x,
                                          const Point& y) {
    int64_t xid = geom.require_vertex(x);
    int64_t yid = geom.require_vertex(y);
    int64_t lo = geom.rdot(xid), hi = geom.rdot(yid);
    require(lo <= hi, Errc::invalid_argument, "r.y < r.x: empty slab");
    auto cluster = band_cluster(geom, config, xid, lo, hi);
    if (!std::binary_search(cluster.begin(), cluster.end(), yid)) return std::nullopt;
    ClusterView view;
    view.vertices = std::move(cluster);
    view.endpoint_x = x;
    view.endpoint_y = y;
    for (int64_t eid = 0; eid < geom.edge_count(); ++eid) {
        if (!config.is_open(eid)) continue;
        const auto& e = geom.edges()[static_cast<size_t>(eid)];
        if (view.contains(e.u) && view.contains(e.v) && geom.rdot(e.u) >= lo &&
            geom.rdot(e.u) <= hi && geom.rdot(e.v) >= lo && geom.rdot(e.v) <= hi)
            view.edges.push_back(eid);
    }
    return view;
}

bool is_h_connected(const SlabGeometry& geom, const BondConfiguration& config, const Point& x,
                    const Point& y) {
    int64_t xid = geom.require_vertex(x);
    int64_t yid = geom.require_vertex(y);
    return h_check(geom, config, xid, yid).connected;
}

bool is_f_connected(const SlabGeometry& geom, const BondConfiguration& config, const Point& x,
                    const Point& y) {
    int64_t xid = geom.require_vertex(x);
    int64_t yid = geom.require_vertex(y);
    if (xid == yid) return false;
    HCheck h = h_check(geom, config, xid, yid);
    if (!h.connected) return false;
    const int64_t lo = geom.rdot(xid), hi = geom.rdot(yid);
    for (int64_t z : h.cluster) {
        if (z == xid || z == yid) continue;
        int64_t rz = geom.rdot(z);
        if (rz <= lo || rz >= hi) continue;
        if (h_check(geom, config, xid, z).connected && h_check(geom, config, z, yid).connected)
            return false;
    }
    return true;
}

RegenerationSkeleton find_regeneration_points(const SlabGeometry& geom,
                                              const ClusterView& cluster) {
    int64_t xid = geom.require_vertex(cluster.endpoint_x);
    int64_t yid = geom.require_vertex(cluster.endpoint_y);
    const int64_t lo = geom.rdot(xid), hi = geom.rdot(yid);
    const int64_t re = geom.r_dot_e();
    const Point& e = geom.spec().e;

    // cluster-based h validation (connectivity is implied by construction)
    require(cluster.contains(xid) && cluster.contains(yid), Errc::not_h_connected,
            "cluster does not join its endpoints");
    {
        auto xe = geom.vertex_id(add(cluster.endpoint_x, e));
        auto ye = geom.vertex_id(sub(cluster.endpoint_y, e));
        bool ok = xid != yid && xe.has_value() && ye.has_value();
        if (ok) {
            for (int64_t v : cluster.vertices) {
                int64_t rz = geom.rdot(v);
                if (rz <= lo + re && v != xid && v != *xe) ok = false;
                if (rz >= hi - re && v != yid && v != *ye) ok = false;
            }
            ok = ok && cluster.contains(*xe) && cluster.contains(*ye);
        }
        require(ok, Errc::not_h_connected, "cluster violates the h-connection conditions");
    }

    RegenerationSkeleton skel;
    std::vector<std::pair<int64_t, Point>> found;
    for (int64_t vid : cluster.vertices) {
        int64_t rz = geom.rdot(vid);
        if (rz < lo + re || rz > hi - re) continue;
        const Point& z = geom.vertex(vid);
        auto below = geom.vertex_id(sub(z, e));
        auto above = geom.vertex_id(add(z, e));
        if (!below || !above) continue;
        if (!cluster.contains(*below) || !cluster.contains(*above)) continue;
        bool exactly_three = true;
        for (int64_t w : cluster.vertices) {
            int64_t rw = geom.rdot(w);
            if (rw < rz - re || rw > rz + re) continue;
            if (w != vid && w != *below && w != *above) {
                exactly_three = false;
                break;
            }
        }
        if (exactly_three) found.emplace_back(rz, z);
    }
    std::sort(found.begin(), found.end());
    for (auto& [rz, z] : found) skel.points.push_back(std::move(z));
    skel.points.push_back(cluster.endpoint_y);
    return skel;
}

bool skeleton_pieces_f_connected(const SlabGeometry& geom, const BondConfiguration& config,
                                 const ClusterView& cluster,
                                 const RegenerationSkeleton& skeleton) {
    Point prev = cluster.endpoint_x;
    for (const auto& pt : skeleton.points) {
        if (!is_f_connected(geom, config, prev, pt)) return false;
        prev = pt;
    }
    return true;
}

} // namespace percbridge
