#include "percbridge/summary_stats.hpp"

#include "percbridge/errors.hpp"

#include <cmath>

namespace percbridge {

SummaryStats::SummaryStats(VecD grid, int value_dim, bool retain_raw)
    : grid_(std::move(grid)), value_dim_(value_dim), retain_raw_(retain_raw) {
    require(!grid_.empty() && value_dim_ >= 1, Errc::invalid_argument,
            "summary stats need a grid and a positive value dimension");
    for (size_t i = 0; i + 1 < grid_.size(); ++i)
        require(grid_[i] < grid_[i + 1], Errc::invalid_argument,
                "time grid must be strictly increasing");
    const size_t t = grid_.size() * static_cast<size_t>(value_dim_);
    sum_.assign(t, 0.0);
    sum2_.assign(t, 0.0);
    const size_t tt = grid_.size() * grid_.size() * static_cast<size_t>(value_dim_);
    cross_.assign(tt, 0.0);
    cross_x2y_.assign(tt, 0.0);
    cross_xy2_.assign(tt, 0.0);
    cross_x2y2_.assign(tt, 0.0);
    marginal_hist_.resize(t);
}

VecD SummaryStats::default_grid(int points) {
    VecD g(static_cast<size_t>(points) + 1);
    for (int i = 0; i <= points; ++i)
        g[static_cast<size_t>(i)] = static_cast<double>(i) / static_cast<double>(points);
    return g;
}

size_t SummaryStats::grid_index(double t) const {
    for (size_t i = 0; i < grid_.size(); ++i)
        if (std::abs(grid_[i] - t) <= 1e-12) return i;
    fail(Errc::time_not_on_grid, "time " + std::to_string(t) + " is not on the recorded grid");
}

void SummaryStats::add_path(const ScaledPath& path) {
    require(path.value_dim() == value_dim_, Errc::dimension_mismatch,
            "path value dimension mismatch");
    std::vector<VecD> vals(grid_.size());
    for (size_t i = 0; i < grid_.size(); ++i) vals[i] = path.evaluate(grid_[i]);
    add_grid_values(vals, path.sup_norm());
}

void SummaryStats::add_grid_values(const std::vector<VecD>& vals, double sup_norm) {
    require(vals.size() == grid_.size(), Errc::grid_mismatch, "grid size mismatch");
    ++count_;
    for (size_t t = 0; t < grid_.size(); ++t) {
        for (int c = 0; c < value_dim_; ++c) {
            double v = vals[t][static_cast<size_t>(c)];
            sum_[idx(t, c)] += v;
            sum2_[idx(t, c)] += v * v;
            ++marginal_hist_[idx(t, c)][v];
        }
    }
    for (size_t s = 0; s < grid_.size(); ++s)
        for (size_t t = s; t < grid_.size(); ++t)
            for (int c = 0; c < value_dim_; ++c) {
                double x = vals[s][static_cast<size_t>(c)];
                double y = vals[t][static_cast<size_t>(c)];
                cross_[idx2(s, t, c)] += x * y;
                cross_x2y_[idx2(s, t, c)] += x * x * y;
                cross_xy2_[idx2(s, t, c)] += x * y * y;
                cross_x2y2_[idx2(s, t, c)] += x * x * y * y;
            }
    ++sup_hist_[sup_norm];
    if (retain_raw_) {
        VecD flat(grid_.size() * static_cast<size_t>(value_dim_));
        for (size_t t = 0; t < grid_.size(); ++t)
            for (int c = 0; c < value_dim_; ++c)
                flat[idx(t, c)] = vals[t][static_cast<size_t>(c)];
        raw_.push_back(std::move(flat));
    }
}

void SummaryStats::add_increment_norm(double norm) {
    ++increment_count_;
    ++increment_hist_[norm];
}

void SummaryStats::merge(const SummaryStats& other) {
    require(grid_ == other.grid_ && value_dim_ == other.value_dim_, Errc::grid_mismatch,
            "cannot merge stats over different grids");
    count_ += other.count_;
    increment_count_ += other.increment_count_;
    for (size_t i = 0; i < sum_.size(); ++i) {
        sum_[i] += other.sum_[i];
        sum2_[i] += other.sum2_[i];
    }
    for (size_t i = 0; i < cross_.size(); ++i) {
        cross_[i] += other.cross_[i];
        cross_x2y_[i] += other.cross_x2y_[i];
        cross_xy2_[i] += other.cross_xy2_[i];
        cross_x2y2_[i] += other.cross_x2y2_[i];
    }
    for (size_t i = 0; i < marginal_hist_.size(); ++i)
        for (const auto& [v, n] : other.marginal_hist_[i]) marginal_hist_[i][v] += n;
    for (const auto& [v, n] : other.sup_hist_) sup_hist_[v] += n;
    for (const auto& [v, n] : other.increment_hist_) increment_hist_[v] += n;
    if (retain_raw_ && other.retain_raw_) {
        raw_.insert(raw_.end(), other.raw_.begin(), other.raw_.end());
    } else if (retain_raw_) {
        retain_raw_ = false;
        raw_.clear();
    }
}

SummaryStats merge_stats(const SummaryStats& a, const SummaryStats& b) {
    SummaryStats out(a);
    out.merge(b);
    return out;
}

} // namespace percbridge
