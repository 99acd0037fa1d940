#ifndef PERCBRIDGE_BASIS_FRAME_HPP
#define PERCBRIDGE_BASIS_FRAME_HPP

#include "percbridge/point.hpp"

#include <utility>
#include <vector>

namespace percbridge {

/// Orthonormal basis {f_1, ..., f_d} with f_1 = a/|a| for a lattice
/// direction a. Frame coordinates split a vector into its component along a
/// (first coordinate) and the d-1 transverse components.
class BasisFrame {
  public:
    explicit BasisFrame(Point direction_a);

    int dim() const { return static_cast<int>(frame_.size()); }
    const Point& direction() const { return a_; }
    double direction_norm() const { return a_norm_; }
    const VecD& f1() const { return frame_[0]; }
    const std::vector<VecD>& vectors() const { return frame_; }

    // frame coordinates (t, y_1, ..., y_{d-1})
    VecD to_frame(const VecD& v) const;
    VecD to_frame(const Point& v) const;
    VecD from_frame(const VecD& coords) const;

    double longitudinal(const Point& v) const { return dot(frame_[0], v); }
    VecD transverse(const Point& v) const;

  private:
    Point a_;
    double a_norm_;
    std::vector<VecD> frame_;
};

// mu = mu_a + mu_or with mu_a parallel to a and mu_or orthogonal to a.
std::pair<VecD, VecD> mean_decompose(const VecD& mu, const Point& a);

} // namespace percbridge

#endif
