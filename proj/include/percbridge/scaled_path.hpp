#ifndef PERCBRIDGE_SCALED_PATH_HPP
#define PERCBRIDGE_SCALED_PATH_HPP

#include "percbridge/basis_frame.hpp"
#include "percbridge/bridge_tables.hpp"
#include "percbridge/point.hpp"

#include <utility>
#include <vector>

namespace percbridge {

/// Piecewise-linear path on [0,1] with values in R^m.
class ScaledPath {
  public:
    ScaledPath(std::vector<double> times, std::vector<VecD> values);

    size_t knot_count() const { return times_.size(); }
    int value_dim() const { return values_.empty() ? 0 : static_cast<int>(values_[0].size()); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<VecD>& values() const { return values_; }

    VecD evaluate(double t) const;
    double evaluate(double t, int coordinate) const { return evaluate(t)[static_cast<size_t>(coordinate)]; }
    // sup over t of the Euclidean norm of the value (attained at a knot)
    double sup_norm() const;

  private:
    std::vector<double> times_;
    std::vector<VecD> values_;
};

// knots (i/n, S_i / sqrt(n)); path must have exactly n steps (LengthMismatch)
ScaledPath interpolate_scale(const BridgePath& path, int64_t n);

// Interpolation of 0 and [t_i/(n|a|), Y_i/sqrt(n)] for frame-coordinate points
// (t_i, Y_i). Pinned input: t_k = n|a| and Y_k = 0.
// Errors: NonMonotoneTime, UnpinnedEndpoint.
ScaledPath skeleton_scale(const std::vector<std::pair<double, VecD>>& points, int64_t n,
                          const Point& a);

} // namespace percbridge

#endif
