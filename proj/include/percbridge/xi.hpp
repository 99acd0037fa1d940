#ifndef PERCBRIDGE_XI_HPP
#define PERCBRIDGE_XI_HPP

#include "percbridge/point.hpp"

#include <cstdint>
#include <vector>

namespace percbridge {

struct XiEstimate {
    double xi = 0.0;        // fitted decay rate of -log P[0 <-> n x] per unit n
    double se = 0.0;        // standard error of the slope (binomial variance model)
    double intercept = 0.0;
    std::vector<int64_t> ns;
    std::vector<double> p_hat;
    std::vector<uint64_t> hits;
    uint64_t samples_per_n = 0;
};

// Monte Carlo estimate of the inverse correlation length along `direction`:
// the cluster of 0 is grown edge by edge inside a box with `margin` of
// clearance around [0, n*direction], and P[0 <-> n*direction] is fitted as
// exp(-xi n). Box margin must make the truncation error negligible next to
// the statistical error. Errors: InsufficientAcceptances when some P-hat = 0.
XiEstimate estimate_xi(int dim, double p, const Point& direction,
                       const std::vector<int64_t>& n_range, uint64_t samples, uint64_t seed,
                       int64_t margin = 8, bool parallel = true);

} // namespace percbridge

#endif
