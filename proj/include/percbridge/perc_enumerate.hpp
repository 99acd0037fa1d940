#ifndef PERCBRIDGE_PERC_ENUMERATE_HPP
#define PERCBRIDGE_PERC_ENUMERATE_HPP

#include "percbridge/percolation.hpp"
#include "percbridge/rational.hpp"

#include <vector>

namespace percbridge {

// At most this many edges can be enumerated exhaustively (2^24 configurations).
inline constexpr int64_t kEnumerationEdgeBudget = 24;

struct PairConnectivity {
    Rational h;
    Rational f;
};

// Exact h/f connection probabilities between two in-slab points, by summing
// p^{open} (1-p)^{closed} over every configuration of the band sub-slab.
// Requires an exact p on the spec. Errors: EnumerationBudgetExceeded.
PairConnectivity enumerate_pair_connectivity(const SlabGeometry& geom, const Point& u,
                                             const Point& v);

struct ConnectivityRow {
    Point x;
    Rational h;
    Rational f;
};

// h_r(x), f_r(x) from the slab origin to every in-slab x.
std::vector<ConnectivityRow> enumerate_connectivity(const SlabGeometry& geom);

struct PatternProbability {
    std::vector<Point> junctions; // regeneration points, endpoint included
    Rational prob;                // exact P[h-connected with exactly this pattern]
};

struct PatternDistribution {
    Rational h_total; // P[0 <-h-> y], equals the sum over patterns
    std::vector<PatternProbability> patterns;
};

// One exhaustive pass grouping h-connected configurations by regeneration set.
PatternDistribution enumerate_regeneration_patterns(const SlabGeometry& geom);

// Product side of the renewal factorization for a junction chain, with the
// per-junction normalizer taken from the truncated graph (the number of
// perpendicular edges actually present at the junction).
Rational factorization_rhs(const SlabGeometry& geom, const std::vector<Point>& junctions,
                           std::vector<Rational>* piece_f = nullptr);

struct FactorizationCheck {
    std::vector<Point> junctions;
    Rational lhs; // exact enumeration of {h-connected, exactly these regeneration points}
    Rational rhs; // normalized product of piece f values
    std::vector<Rational> piece_f;
    bool equal = false;
};

// Pattern given as increments x_1, ..., x_k with increasing r-coordinates
// summing to the slab endpoint.
FactorizationCheck verify_renewal_factorization(const SlabGeometry& geom,
                                                const std::vector<Point>& increments);

struct RenewalRelationRow {
    Point x;
    Rational lhs;     // h(0 -> x)
    Rational rhs;     // sum_z f(0 -> z) h(z -> x) / (1-p)^{q(z)} on the truncated slab
    double paper_rhs; // same sum with the untruncated normalizer and origin-based h
};

struct RenewalRelationReport {
    std::vector<RenewalRelationRow> rows;
    bool exact = false;             // lhs == rhs for every row
    double max_paper_discrepancy = 0.0; // truncation-attributable gap
};

RenewalRelationReport verify_renewal_relation(const SlabGeometry& geom);

} // namespace percbridge

#endif
