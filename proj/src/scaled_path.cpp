#include "percbridge/scaled_path.hpp"

#include "percbridge/errors.hpp"

#include <algorithm>
#include <cmath>

namespace percbridge {

ScaledPath::ScaledPath(std::vector<double> times, std::vector<VecD> values)
    : times_(std::move(times)), values_(std::move(values)) {
    require(times_.size() == values_.size() && times_.size() >= 2, Errc::invalid_argument,
            "need matching times/values with at least two knots");
    require(std::abs(times_.front()) <= 1e-12 && std::abs(times_.back() - 1.0) <= 1e-12,
            Errc::invalid_argument, "times must run from 0 to 1");
    times_.front() = 0.0;
    times_.back() = 1.0;
    for (size_t i = 0; i + 1 < times_.size(); ++i)
        require(times_[i] < times_[i + 1], Errc::non_monotone_time,
                "knot times must be strictly increasing");
    size_t m = values_.front().size();
    for (const auto& v : values_)
        require(v.size() == m, Errc::dimension_mismatch, "knot value dimensions differ");
}

VecD ScaledPath::evaluate(double t) const {
    require(t >= -1e-12 && t <= 1.0 + 1e-12, Errc::invalid_argument, "t must be in [0,1]");
    t = std::clamp(t, 0.0, 1.0);
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    size_t hi = std::min(static_cast<size_t>(it - times_.begin()), times_.size() - 1);
    size_t lo = hi - 1;
    if (t <= times_.front()) return values_.front();
    double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
    VecD out(values_[lo].size());
    for (size_t c = 0; c < out.size(); ++c)
        out[c] = (1.0 - w) * values_[lo][c] + w * values_[hi][c];
    return out;
}

double ScaledPath::sup_norm() const {
    double s = 0.0;
    for (const auto& v : values_) s = std::max(s, norm2(v));
    return s;
}

ScaledPath interpolate_scale(const BridgePath& path, int64_t n) {
    require(static_cast<int64_t>(path.steps()) == n, Errc::length_mismatch,
            "path has " + std::to_string(path.steps()) + " steps, expected " + std::to_string(n));
    require(n >= 1, Errc::invalid_argument, "need n >= 1");
    const double root = std::sqrt(static_cast<double>(n));
    std::vector<double> times(path.points.size());
    std::vector<VecD> values(path.points.size());
    for (size_t i = 0; i < path.points.size(); ++i) {
        times[i] = static_cast<double>(i) / static_cast<double>(n);
        VecD v = to_vecd(path.points[i]);
        for (auto& c : v) c /= root;
        values[i] = std::move(v);
    }
    return ScaledPath(std::move(times), std::move(values));
}

ScaledPath skeleton_scale(const std::vector<std::pair<double, VecD>>& points, int64_t n,
                          const Point& a) {
    require(!points.empty(), Errc::invalid_argument, "need at least the endpoint");
    require(n >= 1, Errc::invalid_argument, "need n >= 1");
    const double na = static_cast<double>(n) * norm2(a);
    const double root = std::sqrt(static_cast<double>(n));

    double prev = 0.0;
    for (const auto& [t, y] : points) {
        require(t > prev, Errc::non_monotone_time, "skeleton times must strictly increase");
        prev = t;
    }
    const auto& [tk, yk] = points.back();
    require(std::abs(tk - na) <= 1e-9 * std::max(1.0, na), Errc::unpinned_endpoint,
            "last longitudinal coordinate must equal n|a|");
    for (double c : yk)
        require(std::abs(c) <= 1e-9, Errc::unpinned_endpoint,
                "pinned skeleton must end at transverse zero");

    std::vector<double> times;
    std::vector<VecD> values;
    times.reserve(points.size() + 1);
    values.reserve(points.size() + 1);
    const size_t m = points.front().second.size();
    times.push_back(0.0);
    values.emplace_back(m, 0.0);
    for (const auto& [t, y] : points) {
        times.push_back(t / na);
        VecD v(y);
        for (auto& c : v) c /= root;
        values.push_back(std::move(v));
    }
    times.back() = 1.0;
    values.back().assign(m, 0.0); // pinned exactly
    return ScaledPath(std::move(times), std::move(values));
}

} // namespace percbridge
