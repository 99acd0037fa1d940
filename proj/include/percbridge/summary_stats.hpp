#ifndef PERCBRIDGE_SUMMARY_STATS_HPP
#define PERCBRIDGE_SUMMARY_STATS_HPP

#include "percbridge/point.hpp"
#include "percbridge/scaled_path.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace percbridge {

/// Mergeable empirical moments of scaled-path ensembles on a fixed time grid:
/// per-time sums, cross products up to the orders needed for covariance
/// standard errors, exact value histograms per grid time, and histograms of
/// path suprema and increment norms. Merging shards in a fixed order is the
/// cross-thread reduction everywhere; integer fields merge bit-exactly.
class SummaryStats {
  public:
    SummaryStats() = default;
    SummaryStats(VecD grid, int value_dim, bool retain_raw = true);

    static VecD default_grid(int points = 16); // {i/points : i = 0..points}

    void add_path(const ScaledPath& path);
    void add_grid_values(const std::vector<VecD>& values_at_grid, double sup_norm);
    void add_increment_norm(double norm);

    void merge(const SummaryStats& other); // errors: GridMismatch

    uint64_t count() const { return count_; }
    uint64_t increment_count() const { return increment_count_; }
    const VecD& grid() const { return grid_; }
    int value_dim() const { return value_dim_; }
    bool retains_raw() const { return retain_raw_; }

    // treat the ensemble as exhaustive (population divisors, no sampling error)
    bool exhaustive = false;

    size_t grid_index(double t) const; // errors: TimeNotOnGrid

    double sum(size_t t, int c) const { return sum_[idx(t, c)]; }
    double sum2(size_t t, int c) const { return sum2_[idx(t, c)]; }
    double cross(size_t s, size_t t, int c) const { return cross_[idx2(s, t, c)]; }
    double cross_x2y(size_t s, size_t t, int c) const { return cross_x2y_[idx2(s, t, c)]; }
    double cross_xy2(size_t s, size_t t, int c) const { return cross_xy2_[idx2(s, t, c)]; }
    double cross_x2y2(size_t s, size_t t, int c) const { return cross_x2y2_[idx2(s, t, c)]; }

    const std::map<double, uint64_t>& marginal_hist(size_t t, int c) const {
        return marginal_hist_[idx(t, c)];
    }
    const std::map<double, uint64_t>& sup_hist() const { return sup_hist_; }
    const std::map<double, uint64_t>& increment_hist() const { return increment_hist_; }

    // raw[sample][t*value_dim + c]; empty when retain_raw is off
    const std::vector<VecD>& raw() const { return raw_; }

  private:
    size_t idx(size_t t, int c) const {
        return t * static_cast<size_t>(value_dim_) + static_cast<size_t>(c);
    }
    size_t idx2(size_t s, size_t t, int c) const {
        return (s * grid_.size() + t) * static_cast<size_t>(value_dim_) +
               static_cast<size_t>(c);
    }

    VecD grid_;
    int value_dim_ = 0;
    bool retain_raw_ = true;
    uint64_t count_ = 0;
    uint64_t increment_count_ = 0;
    VecD sum_, sum2_;
    VecD cross_, cross_x2y_, cross_xy2_, cross_x2y2_;
    std::vector<std::map<double, uint64_t>> marginal_hist_;
    std::map<double, uint64_t> sup_hist_;
    std::map<double, uint64_t> increment_hist_;
    std::vector<VecD> raw_;

    friend struct SummaryStatsAccess;
};

SummaryStats merge_stats(const SummaryStats& a, const SummaryStats& b);

} // namespace percbridge

#endif
