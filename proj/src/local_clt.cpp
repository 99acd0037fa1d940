#include "percbridge/local_clt.hpp"

#include "percbridge/errors.hpp"

#include <cmath>
#include <vector>

namespace percbridge {

double local_clt_distance(const StepLaw& law, int64_t n) {
    require(law.dim() == 1, Errc::dimension_mismatch, "local CLT distance needs a 1-d law");
    require(n >= 1, Errc::invalid_argument, "n must be >= 1");
    require(std::abs(law.mean()[0]) <= 1e-12, Errc::nonzero_mean,
            "law must have zero mean; tilt it first");
    const double sigma2 = law.covariance()[0][0];
    require(sigma2 > 1e-12, Errc::zero_variance, "law must have positive variance");
    const double sigma = std::sqrt(sigma2);

    auto sp = law.span(0);
    const int64_t h = sp.h;
    const int64_t b = sp.b;

    int64_t smin = law.atoms().front().x[0];
    int64_t smax = law.atoms().back().x[0];
    const int64_t lo = n * smin;
    const int64_t hi = n * smax;

    // exact n-fold convolution over the reachable range
    std::vector<double> cur(static_cast<size_t>(hi - lo) + 1, 0.0);
    cur[static_cast<size_t>(-lo)] = 1.0; // S_0 = 0
    std::vector<double> next(cur.size());
    for (int64_t step = 0; step < n; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (size_t i = 0; i < cur.size(); ++i) {
            if (cur[i] == 0.0) continue;
            for (const auto& a : law.atoms()) {
                int64_t v = lo + static_cast<int64_t>(i) + a.x[0];
                if (v < lo || v > hi) continue;
                next[static_cast<size_t>(v - lo)] += cur[i] * a.p;
            }
        }
        cur.swap(next);
    }

    const double root = std::sqrt(static_cast<double>(n));
    const double scale = root / static_cast<double>(h);
    auto phi = [&](double x) {
        return std::exp(-x * x / (2.0 * sigma2)) / (sigma * std::sqrt(2.0 * M_PI));
    };

    // S_n lives on n b + h Z; scan the reachable lattice plus one point beyond
    // each side (the normal density is monotone out there, so the first
    // unreachable point dominates the unreachable tail).
    int64_t first = n * b; // representative in n b + h Z
    while (first - h >= lo) first -= h;
    double sup = 0.0;
    for (int64_t v = first - h; v <= hi + h; v += h) {
        double p = (v >= lo && v <= hi) ? cur[static_cast<size_t>(v - lo)] : 0.0;
        double x = static_cast<double>(v) / root;
        sup = std::max(sup, std::abs(scale * p - phi(x)));
    }
    return sup;
}

} // namespace percbridge
