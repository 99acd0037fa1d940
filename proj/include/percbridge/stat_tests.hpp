#ifndef PERCBRIDGE_STAT_TESTS_HPP
#define PERCBRIDGE_STAT_TESTS_HPP

#include "percbridge/summary_stats.hpp"

#include <map>
#include <string>
#include <vector>

namespace percbridge {

/// Pass/fail outcome of one statistical check. The pass flag is always
/// `statistic <= threshold` (at_most) or `statistic >= threshold` (at_least).
struct TestReport {
    enum class Direction { at_most, at_least };

    std::string test;
    std::string claim; // paper-claim key used by the report matrix
    std::string null_desc;
    double statistic = 0.0;
    double threshold = 0.0;
    Direction direction = Direction::at_most;
    bool pass = false;
    uint64_t n_samples = 0;
    std::map<std::string, double> details;
    std::string note;

    static TestReport make(std::string test, std::string claim, std::string null_desc,
                           double statistic, double threshold, Direction dir,
                           uint64_t n_samples);
};

struct CovarianceEstimate {
    double value = 0.0;
    double se = 0.0;
};

// Sample covariance of path values at grid times s and t with a jackknife
// standard error (exact leave-one-out when raw samples are retained, the
// moment expansion otherwise). Exhaustive ensembles use population divisors.
// Errors: TimeNotOnGrid, TooFewSamples.
CovarianceEstimate empirical_covariance(const SummaryStats& stats, double s, double t,
                                        int coordinate = 0);

// Fits the single scale C in Cov(s,t) ~ C s(1-t) over grid pairs with
// [ns] < [nt], then reports the worst standardized residual and the
// scale-free covariance ratio checks. Errors: DegenerateFit.
TestReport bridge_covariance_test(const SummaryStats& stats, int64_t n, int coordinate = 0,
                                  double threshold = 4.5);

// Two-sided KS of the marginal at time t against N(0, t(1-t) c_scale).
// Lattice-valued marginals are tested against the lattice-discretized normal.
// Errors: TooFewSamples (< 100), ZeroVariance (t at a pinned endpoint).
TestReport marginal_gaussian_test(const SummaryStats& stats, double t, double c_scale,
                                  int coordinate = 0, double p_threshold = 0.01);

// Linear fit of the log empirical tail of increment norms; passes when the
// slope is negative with R^2 > 0.9. Errors: TooFewSamples (< 1000).
TestReport increment_tail_test(const std::map<double, uint64_t>& norm_hist);
TestReport increment_tail_test(const std::vector<double>& norms);

// Pooled lag-1 correlation of consecutive increments with a permutation
// p-value; the threshold absorbs the O(1/k) pinning-induced correlation.
// Errors: TooFewSamples (< 1000 pairs).
TestReport independence_diagnostic(const std::vector<std::vector<VecD>>& increment_sequences,
                                   uint64_t permutation_seed = 12345,
                                   int permutations = 200);

struct MaxFluctuationSummary {
    std::vector<double> sup_values; // sorted
    std::map<double, uint64_t> sup_hist;
    std::map<double, uint64_t> window_max_hist; // pooled over windows
    double window_width = 0.125;

    double quantile(double q) const;
    double mean() const;
};

MaxFluctuationSummary max_fluctuation_stats(const std::vector<ScaledPath>& paths,
                                            double window_width = 0.125);

// Kolmogorov asymptotic tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double ks_asymptotic_pvalue(double lambda);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
    uint64_t n = 0;
    bool discrete_null = false;
};

// KS distance of a value histogram against a centered normal; when the values
// sit on a lattice, the null is discretized to that lattice first.
KsResult ks_test_against_normal(const std::map<double, uint64_t>& hist, double variance);

} // namespace percbridge

#endif
