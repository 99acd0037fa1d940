#include "percbridge/bridge_tables.hpp"

#include <cmath>

namespace percbridge {

void validate_bridge_path(const BridgePath& path, const StepLaw& law) {
    require(!path.points.empty(), Errc::invalid_argument, "empty bridge path");
    require(path.points.back() == path.pinned_at, Errc::unpinned_endpoint,
            "path does not end at its pinned endpoint");
    for (size_t i = 0; i + 1 < path.points.size(); ++i) {
        Point step = sub(path.points[i + 1], path.points[i]);
        bool found = false;
        for (const auto& a : law.atoms())
            if (a.x == step) {
                found = true;
                break;
            }
        require(found, Errc::invalid_argument,
                "increment " + format_point(step) + " is not in the step law support");
    }
}

CnEstimate estimate_cn_mc(const std::vector<double>& mid, int64_t n) {
    require(mid.size() >= 2, Errc::too_few_samples, "need at least two midpoint samples");
    const double parity = (n % 2 == 0) ? 1.0 : static_cast<double>(n) / static_cast<double>(n - 1);
    double s1 = 0, s2 = 0;
    for (double v : mid) {
        double q = v * v;
        s1 += q;
        s2 += q * q;
    }
    const double nn = static_cast<double>(mid.size());
    double mean_sq = s1 / nn;
    double var_sq = std::max(0.0, s2 / nn - mean_sq * mean_sq);
    CnEstimate est;
    est.n = n;
    est.value = 4.0 * parity * mean_sq;
    est.se = 4.0 * parity * std::sqrt(var_sq / nn);
    est.limit = 0.0;
    return est;
}

BridgePath sample_bridge_rejection(const StepLaw& law, int64_t n, const Point& endpoint,
                                   Rng& rng, uint64_t max_attempts) {
    std::vector<double> probs(law.size());
    double total = 0;
    for (size_t i = 0; i < law.size(); ++i) {
        probs[i] = law.atoms()[i].p;
        total += probs[i];
    }
    for (uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
        BridgePath path;
        path.pinned_at = endpoint;
        Point cur(law.dim(), 0);
        path.points.push_back(cur);
        for (int64_t i = 0; i < n; ++i) {
            size_t pick = rng.categorical(probs, total);
            cur = add(cur, law.atoms()[pick].x);
            path.points.push_back(cur);
        }
        if (cur == endpoint) return path;
    }
    fail(Errc::attempt_budget_exhausted, "rejection sampler found no pinned path");
}

} // namespace percbridge
