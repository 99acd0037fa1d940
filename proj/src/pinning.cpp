#include "percbridge/pinning.hpp"

#include "percbridge/basis_frame.hpp"
#include "percbridge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace percbridge {

PinningWindow PinningWindow::from(const StepLaw& law, const Point& a, int64_t n, double M) {
    require(static_cast<int>(a.size()) == law.dim(), Errc::dimension_mismatch,
            "direction dimension mismatch");
    auto [mu_a, mu_or] = mean_decompose(law.mean(), a);
    PinningWindow w;
    w.kappa = norm2(mu_a) / norm2(a);
    require(w.kappa > 0, Errc::drift_violation, "law has no drift along a");
    w.center = static_cast<double>(n) / w.kappa;
    w.half_width_M = M;
    double hw = M * std::sqrt(static_cast<double>(n));
    w.k_lo = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(w.center - hw)));
    w.k_hi = static_cast<int64_t>(std::floor(w.center + hw));
    return w;
}

PinningDistribution pinning_time_distribution(const StepLaw& law, const Point& a, int64_t n,
                                              double window_M, int64_t cap) {
    const int d = law.dim();
    require(static_cast<int>(a.size()) == d, Errc::dimension_mismatch,
            "direction dimension mismatch");
    require(n >= 1, Errc::invalid_argument, "need n >= 1");
    int64_t min_adot = INT64_MAX;
    Point abs_max(d, 0);
    for (const auto& atom : law.atoms()) {
        int64_t v = dot(atom.x, a);
        require(v > 0, Errc::drift_violation,
                "step " + format_point(atom.x) + " has a.x <= 0");
        min_adot = std::min(min_adot, v);
        for (int c = 0; c < d; ++c)
            abs_max[c] = std::max(abs_max[c], std::abs(atom.x[c]));
    }

    PinningDistribution out;
    out.n = n;
    out.a = a;
    out.window = PinningWindow::from(law, a, n, window_M);
    if (cap <= 0) cap = static_cast<int64_t>(std::ceil(4.0 * static_cast<double>(n) /
                                                       out.window.kappa));
    const int64_t target_adot = n * dot(a, a);
    const Point target = scale(a, n);
    out.prob.assign(1, 0.0);

    std::map<Point, double> cur;
    cur[Point(d, 0)] = 1.0;
    int64_t k = 0;
    while (!cur.empty()) {
        ++k;
        if (k > cap) {
            // Live mass past the cap bounds the truncated pinning mass from
            // above; by the large-deviation bound it should be negligible.
            double live = 0.0;
            for (const auto& [x, p] : cur) live += p;
            double found = 0.0;
            for (double p : out.prob) found += p;
            if (live > 1e-9 * (found + live))
                fail(Errc::cap_exceeded,
                     "pinning DP still carries mass " + std::to_string(live) + " at k cap " +
                         std::to_string(cap));
            break;
        }
        std::map<Point, double> next;
        for (const auto& [x, p] : cur) {
            for (size_t ai = 0; ai < law.size(); ++ai) {
                Point nx = add(x, law.atoms()[ai].x);
                int64_t adot = dot(nx, a);
                if (adot > target_adot) continue;
                // componentwise feasibility of still reaching n a
                int64_t r_max = (target_adot - adot) / min_adot;
                bool ok = true;
                for (int c = 0; c < d && ok; ++c)
                    if (std::abs(target[c] - nx[c]) > r_max * abs_max[c]) ok = false;
                if (!ok && nx != target) continue;
                next[std::move(nx)] += p * law.atoms()[ai].p;
            }
        }
        auto hit = next.find(target);
        out.prob.push_back(hit == next.end() ? 0.0 : hit->second);
        // a state equal to the target is absorbed: it cannot continue (a.X > 0
        // would overshoot), so drop it from the live set
        if (hit != next.end()) next.erase(hit);
        cur = std::move(next);
    }
    out.k_max = static_cast<int64_t>(out.prob.size()) - 1;

    out.total = 0.0;
    for (double p : out.prob) out.total += p;
    require(out.total > 0.0, Errc::no_pinning_possible,
            "no k with P[S_k = n a] > 0 up to the cap");
    for (int64_t kk = 1; kk <= out.k_max; ++kk)
        (out.window.contains(kk) ? out.mass_inside : out.mass_outside) += out.prob[kk];

    // Gaussian profile fit: log p_k = alpha - (d/2) log k - u^2/(2v)
    double peak = *std::max_element(out.prob.begin(), out.prob.end());
    std::vector<double> xs, ys;
    for (int64_t kk = 1; kk <= out.k_max; ++kk) {
        if (out.prob[kk] <= peak * 1e-8) continue;
        double u = (static_cast<double>(n) - static_cast<double>(kk) * out.window.kappa) /
                   std::sqrt(static_cast<double>(kk));
        xs.push_back(u * u);
        ys.push_back(std::log(out.prob[kk]) +
                     0.5 * d * std::log(static_cast<double>(kk)));
    }
    if (xs.size() >= 3) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        const double m = static_cast<double>(xs.size());
        for (size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
            syy += ys[i] * ys[i];
        }
        double denom = m * sxx - sx * sx;
        if (denom > 1e-12) {
            double slope = (m * sxy - sx * sy) / denom;
            out.profile_alpha = (sy - slope * sx) / m;
            out.profile_variance = slope < 0 ? -0.5 / slope : 0.0;
            double sst = syy - sy * sy / m;
            double ssr = 0;
            for (size_t i = 0; i < xs.size(); ++i) {
                double r = ys[i] - (out.profile_alpha + slope * xs[i]);
                ssr += r * r;
            }
            out.profile_r2 = sst > 0 ? 1.0 - ssr / sst : 1.0;
        }
    } else {
        out.profile_r2 = 1.0; // degenerate: too few support points to falsify
    }
    return out;
}

FreePinnedBridgeSampler::FreePinnedBridgeSampler(const StepLaw& law, Point a, int64_t n,
                                                 double window_M, int64_t cap,
                                                 size_t state_budget,
                                                 double relative_mass_cutoff)
    : law_(law), a_(std::move(a)), n_(n) {
    dist_ = pinning_time_distribution(law_, a_, n_, window_M, cap);
    double peak = *std::max_element(dist_.prob.begin(), dist_.prob.end());
    const Point target = scale(a_, n_);
    for (int64_t k = 1; k <= dist_.k_max; ++k) {
        if (dist_.prob[k] <= peak * relative_mass_cutoff) continue;
        ks_.push_back(k);
        k_weights_.push_back(dist_.prob[k]);
        k_weight_total_ += dist_.prob[k];
        tables_.push_back(std::make_unique<BridgeTables<double>>(law_, k, target, state_budget));
    }
    require(!ks_.empty(), Errc::no_pinning_possible, "pinning law has empty support");
}

std::pair<int64_t, BridgePath> FreePinnedBridgeSampler::sample(Rng& rng) const {
    size_t pick = rng.categorical(k_weights_, k_weight_total_);
    return {ks_[pick], tables_[pick]->sample(rng)};
}

double time_deviation(const BridgePath& path, int64_t n, const Point& a) {
    require(!path.points.empty(), Errc::invalid_argument, "empty path");
    const double na = static_cast<double>(n) * norm2(a);
    const double k = static_cast<double>(path.steps());
    const double inv_norm_a = 1.0 / norm2(a);
    double worst = 0.0;
    for (size_t j = 0; j < path.points.size(); ++j) {
        double tj = static_cast<double>(dot(path.points[j], a)) * inv_norm_a;
        double dev = std::abs(tj / na - static_cast<double>(j) / k);
        worst = std::max(worst, dev);
    }
    return worst;
}

} // namespace percbridge
