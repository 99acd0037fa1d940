#ifndef PERCBRIDGE_LOCAL_CLT_HPP
#define PERCBRIDGE_LOCAL_CLT_HPP

#include "percbridge/step_law.hpp"

#include <cstdint>

namespace percbridge {

/// sup over the step-n lattice of |(sqrt(n)/h) P[S_n/sqrt(n) = x] - phi_sigma(x)|,
/// with p_n computed by exact n-fold convolution. The law must be
/// one-dimensional with zero mean (tilt first otherwise) and positive variance.
/// Errors: NonzeroMean, ZeroVariance, InvalidArgument (n < 1).
double local_clt_distance(const StepLaw& law, int64_t n);

} // namespace percbridge

#endif
