#ifndef PERCBRIDGE_PINNING_HPP
#define PERCBRIDGE_PINNING_HPP

#include "percbridge/bridge_tables.hpp"
#include "percbridge/point.hpp"
#include "percbridge/rng.hpp"
#include "percbridge/step_law.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace percbridge {

/// Step-count window I_M = [n/kappa - M sqrt(n), n/kappa + M sqrt(n)],
/// kappa = |mu_a| / |a|; carries almost all of the pinning mass.
struct PinningWindow {
    double kappa = 0.0;
    double center = 0.0;
    double half_width_M = 0.0;
    int64_t k_lo = 0; // I_M as an integer interval
    int64_t k_hi = 0;

    static PinningWindow from(const StepLaw& law, const Point& a, int64_t n, double M);
    bool contains(int64_t k) const { return k >= k_lo && k <= k_hi; }
};

/// P[S_k = n a] per step count k (walks with a.X > 0 a.s.), the window mass
/// split, and the Gaussian profile fit in u = (n - k kappa)/sqrt(k) implied by
/// the local CLT.
struct PinningDistribution {
    int64_t n = 0;
    Point a;
    int64_t k_max = 0;            // DP cap actually used
    std::vector<double> prob;     // prob[k], index 0..k_max (prob[0] = 0)
    double total = 0.0;
    PinningWindow window;
    double mass_inside = 0.0;
    double mass_outside = 0.0;
    // log prob[k] = alpha - (d/2) log k - u_k^2 / (2 v): fitted alpha, v, R^2
    double profile_alpha = 0.0;
    double profile_variance = 0.0;
    double profile_r2 = 0.0;
};

// cap = 0 picks the default 4 n / kappa.
// Errors: DriftViolation (an atom with a.x <= 0), CapExceeded, NoPinningPossible.
PinningDistribution pinning_time_distribution(const StepLaw& law, const Point& a, int64_t n,
                                              double window_M = 10.0, int64_t cap = 0);

/// Sampler for the free-pinned ensemble: k proportional to P[S_k = n a],
/// then an exact bridge of length k pinned at n a. Tables for all relevant k
/// are built up front; sampling is const and thread-safe with caller-owned
/// RNG streams.
class FreePinnedBridgeSampler {
  public:
    FreePinnedBridgeSampler(const StepLaw& law, Point a, int64_t n, double window_M = 10.0,
                            int64_t cap = 0, size_t state_budget = 100000000,
                            double relative_mass_cutoff = 1e-12);

    const PinningDistribution& pinning() const { return dist_; }
    const StepLaw& law() const { return law_; }

    // (k, pinned path of length k ending at n a)
    std::pair<int64_t, BridgePath> sample(Rng& rng) const;

  private:
    StepLaw law_;
    Point a_;
    int64_t n_;
    PinningDistribution dist_;
    std::vector<int64_t> ks_;
    std::vector<double> k_weights_;
    double k_weight_total_ = 0.0;
    std::vector<std::unique_ptr<BridgeTables<double>>> tables_; // aligned with ks_
};

// max_j |t_j/(n|a|) - j/k| for a pinned path of length k, t_j = S_j . a/|a|.
double time_deviation(const BridgePath& path, int64_t n, const Point& a);

} // namespace percbridge

#endif
