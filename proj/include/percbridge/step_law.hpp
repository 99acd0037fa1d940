#ifndef PERCBRIDGE_STEP_LAW_HPP
#define PERCBRIDGE_STEP_LAW_HPP

#include "percbridge/point.hpp"
#include "percbridge/rational.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace percbridge {

/// Finitely supported probability law on Z^d increments.
///
/// Probabilities are kept as exact rationals when the law was entered as
/// rationals; the exact mode drives the enumeration and exact-DP oracles.
/// Instances are immutable after construction and safe to share across
/// threads.
class StepLaw {
  public:
    struct Atom {
        Point x;
        double p;
    };

    struct SpanResult {
        int64_t h; // maximal h with P[proj(X) in b + hZ] = 1
        int64_t b; // representative offset in [0, h)
    };

    // Validates and canonicalizes (atoms sorted lexicographically).
    // Errors: EmptySupport, NonPositiveProbability, DuplicateSupportVector,
    // ProbabilitySumMismatch, DimensionMismatch.
    static StepLaw from_atoms(std::vector<std::pair<Point, double>> atoms);
    static StepLaw from_rational_atoms(std::vector<std::pair<Point, Rational>> atoms);

    int dim() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    size_t size() const { return atoms_.size(); }
    bool exact() const { return exact_; }
    // aligned with atoms(); empty unless exact()
    const std::vector<Rational>& rational_probs() const { return rational_probs_; }

    const VecD& mean() const { return mean_; }
    // d x d covariance matrix of one step
    const std::vector<VecD>& covariance() const { return cov_; }
    double variance_along(const VecD& unit_direction) const;

    SpanResult span(const Point& direction) const;
    SpanResult span(int coordinate) const;
    // direction with real entries; projections must be integral (NonLatticeProjection)
    SpanResult span_real(const VecD& direction) const;

    double mgf(const VecD& theta) const;
    // Tilted law with atoms proportional to e^{theta.x} P[x].
    StepLaw tilted(const VecD& theta) const;
    // Exact reweighting by prod_j w_j^{x_j}; requires exact() and w_j > 0.
    StepLaw tilted_exact(const std::vector<Rational>& weights) const;

    // one atom per line: "dx dy ... : p", p rational num/den or decimal
    static StepLaw parse(std::istream& in);
    static StepLaw parse(const std::string& text);
    void format(std::ostream& out) const;
    std::string format() const;

  private:
    StepLaw() = default;
    void derive_moments();

    int dim_ = 0;
    bool exact_ = false;
    std::vector<Atom> atoms_;
    std::vector<Rational> rational_probs_;
    VecD mean_;
    std::vector<VecD> cov_;
};

/// Exponential tilt parameter: theta and the MGF normalizer C_theta.
struct TiltParameter {
    VecD theta;
    double normalizer;
};

// Solves for theta such that the tilted law has the given mean.
// target must lie in the interior of conv(support).
// Errors: TargetOutsideHull, NoConvergence, DimensionMismatch.
std::pair<TiltParameter, StepLaw> solve_tilt(const StepLaw& law, const VecD& target_mean);

} // namespace percbridge

#endif
