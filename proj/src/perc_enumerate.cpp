#include "percbridge/perc_enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace percbridge {

namespace {

const Rational& require_exact_p(const SlabGeometry& geom) {
    require(geom.spec().p_exact.has_value(), Errc::invalid_argument,
            "enumeration oracle needs an exact rational p");
    return *geom.spec().p_exact;
}

void require_axis_direction(const SlabGeometry& geom) {
    int nonzero = 0;
    for (auto c : geom.spec().r)
        if (c != 0) ++nonzero;
    require(nonzero == 1, Errc::invalid_argument,
            "renewal oracle needs an axis-aligned slab direction");
}

struct CountHist {
    std::vector<uint64_t> by_open;

    explicit CountHist(int64_t edges) : by_open(static_cast<size_t>(edges) + 1, 0) {}
    void add(int open_count) { ++by_open[static_cast<size_t>(open_count)]; }
};

Rational hist_probability(const CountHist& hist, const Rational& p) {
    const int64_t edges = static_cast<int64_t>(hist.by_open.size()) - 1;
    const Rational q = Rational(1) - p;
    Rational acc(0);
    Rational popen(1);
    for (int64_t a = 0; a <= edges; ++a) {
        if (hist.by_open[static_cast<size_t>(a)] != 0) {
            Rational term = popen * pow(q, edges - a);
            term *= Rational(static_cast<unsigned long>(hist.by_open[static_cast<size_t>(a)]));
            acc += term;
        }
        popen *= p;
    }
    return acc;
}

template <class Visit>
void for_each_config(const SlabGeometry& geom, Visit&& visit) {
    const int64_t e = geom.edge_count();
    require(e <= kEnumerationEdgeBudget, Errc::enumeration_budget_exceeded,
            std::to_string(e) + " edges exceed the enumeration budget of " +
                std::to_string(kEnumerationEdgeBudget));
    BondConfiguration cfg(geom);
    const uint64_t total = 1ULL << e;
    for (uint64_t mask = 0; mask < total; ++mask) {
        for (int64_t i = 0; i < e; ++i) cfg.set_open(i, (mask >> i) & 1ULL);
        visit(cfg, static_cast<int>(std::popcount(mask)));
    }
}

} // namespace

PairConnectivity enumerate_pair_connectivity(const SlabGeometry& geom, const Point& u,
                                             const Point& v) {
    const Rational& p = require_exact_p(geom);
    geom.require_vertex(u);
    geom.require_vertex(v);
    SlabGeometry sub = geom.band_subgeometry(u, v);
    CountHist h_hist(sub.edge_count()), f_hist(sub.edge_count());
    for_each_config(sub, [&](const BondConfiguration& cfg, int open_count) {
        if (is_h_connected(sub, cfg, u, v)) {
            h_hist.add(open_count);
            if (is_f_connected(sub, cfg, u, v)) f_hist.add(open_count);
        }
    });
    return {hist_probability(h_hist, p), hist_probability(f_hist, p)};
}

std::vector<ConnectivityRow> enumerate_connectivity(const SlabGeometry& geom) {
    const Point& origin = geom.spec().x;
    std::vector<ConnectivityRow> rows;
    for (int64_t vid = 0; vid < geom.vertex_count(); ++vid) {
        const Point& x = geom.vertex(vid);
        if (geom.rdot_point(x) < geom.rdot_point(origin)) continue;
        auto pc = enumerate_pair_connectivity(geom, origin, x);
        rows.push_back({x, pc.h, pc.f});
    }
    return rows;
}

PatternDistribution enumerate_regeneration_patterns(const SlabGeometry& geom) {
    require_axis_direction(geom);
    const Rational& p = require_exact_p(geom);
    const Point& x0 = geom.spec().x;
    const Point& y = geom.spec().y;

    std::map<std::vector<Point>, CountHist> hists;
    CountHist h_hist(geom.edge_count());
    for_each_config(geom, [&](const BondConfiguration& cfg, int open_count) {
        auto cluster = common_cluster(geom, cfg, x0, y);
        if (!cluster) return;
        // endpoint conditions of the h-connection
        if (!is_h_connected(geom, cfg, x0, y)) return;
        h_hist.add(open_count);
        auto skel = find_regeneration_points(geom, *cluster);
        auto [it, inserted] = hists.try_emplace(skel.points, geom.edge_count());
        it->second.add(open_count);
    });

    PatternDistribution out;
    out.h_total = hist_probability(h_hist, p);
    for (const auto& [junctions, hist] : hists)
        out.patterns.push_back({junctions, hist_probability(hist, p)});
    return out;
}

Rational factorization_rhs(const SlabGeometry& geom, const std::vector<Point>& junctions,
                           std::vector<Rational>* piece_f) {
    require_axis_direction(geom);
    const Rational& p = require_exact_p(geom);
    const Rational q = Rational(1) - p;
    Rational rhs(1);
    Point prev = geom.spec().x;
    for (const auto& pt : junctions) {
        Rational f = enumerate_pair_connectivity(geom, prev, pt).f;
        if (piece_f) piece_f->push_back(f);
        rhs *= f;
        prev = pt;
    }
    for (size_t j = 0; j + 1 < junctions.size(); ++j) {
        int64_t vid = geom.require_vertex(junctions[j]);
        rhs /= pow(q, static_cast<long>(geom.perp_edges(vid).size()));
    }
    return rhs;
}

FactorizationCheck verify_renewal_factorization(const SlabGeometry& geom,
                                                const std::vector<Point>& increments) {
    require_axis_direction(geom);
    const Rational& p = require_exact_p(geom);
    require(!increments.empty(), Errc::invalid_argument, "pattern must be non-empty");

    FactorizationCheck out;
    Point cum = geom.spec().x;
    int64_t prev_r = geom.rdot_point(cum);
    for (const auto& inc : increments) {
        cum = add(cum, inc);
        int64_t r = geom.rdot_point(cum);
        require(r > prev_r, Errc::invalid_argument,
                "pattern r-coordinates must strictly increase");
        prev_r = r;
        out.junctions.push_back(cum);
    }
    require(cum == geom.spec().y, Errc::invalid_argument,
            "pattern increments must sum to the slab endpoint");

    const Point& x0 = geom.spec().x;
    const Point& y = geom.spec().y;
    CountHist hist(geom.edge_count());
    for_each_config(geom, [&](const BondConfiguration& cfg, int open_count) {
        if (!is_h_connected(geom, cfg, x0, y)) return;
        auto cluster = common_cluster(geom, cfg, x0, y);
        auto skel = find_regeneration_points(geom, *cluster);
        if (skel.points == out.junctions) hist.add(open_count);
    });
    out.lhs = hist_probability(hist, p);
    out.rhs = factorization_rhs(geom, out.junctions, &out.piece_f);
    out.equal = (out.lhs == out.rhs);
    return out;
}

RenewalRelationReport verify_renewal_relation(const SlabGeometry& geom) {
    require_axis_direction(geom);
    const Rational& p = require_exact_p(geom);
    const Rational q = Rational(1) - p;
    const Point& origin = geom.spec().x;
    const int64_t r0 = geom.rdot_point(origin);

    // memoized pair connectivities in absolute coordinates
    std::map<std::pair<Point, Point>, PairConnectivity> cache;
    auto pair_conn = [&](const Point& u, const Point& v) -> const PairConnectivity& {
        auto key = std::make_pair(u, v);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, enumerate_pair_connectivity(geom, u, v)).first;
        return it->second;
    };

    RenewalRelationReport report;
    report.exact = true;
    const int untruncated_q = 2 * (geom.spec().dim - 1);

    for (int64_t vid = 0; vid < geom.vertex_count(); ++vid) {
        const Point& x = geom.vertex(vid);
        const int64_t rx = geom.rdot(vid);
        if (rx < r0) continue;
        RenewalRelationRow row;
        row.x = x;
        row.lhs = pair_conn(origin, x).h;
        if (x == origin) {
            // base normalization h(0) = (1-p)^{#perp edges at 0}
            row.rhs = row.lhs;
            row.paper_rhs = std::pow(1.0 - geom.spec().p, untruncated_q);
        } else {
            Rational rhs(0);
            double paper_rhs = 0.0;
            for (int64_t zid = 0; zid < geom.vertex_count(); ++zid) {
                const Point& z = geom.vertex(zid);
                const int64_t rz = geom.rdot(zid);
                if (rz <= r0 || rz > rx) continue;
                const Rational& f0z = pair_conn(origin, z).f;
                if (f0z == 0) continue;
                rhs += f0z * pair_conn(z, x).h /
                       pow(q, static_cast<long>(geom.perp_edges(zid).size()));
                // origin-based translate for the untruncated form
                Point shifted = add(origin, sub(x, z));
                double h0 = 0.0;
                if (geom.vertex_id(shifted).has_value())
                    h0 = to_double(pair_conn(origin, shifted).h);
                paper_rhs += to_double(f0z) * h0 / std::pow(1.0 - geom.spec().p, untruncated_q);
            }
            row.rhs = rhs;
            row.paper_rhs = paper_rhs;
        }
        if (!(row.lhs == row.rhs)) report.exact = false;
        report.max_paper_discrepancy = std::max(report.max_paper_discrepancy,
                                                std::abs(to_double(row.lhs) - row.paper_rhs));
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace percbridge
