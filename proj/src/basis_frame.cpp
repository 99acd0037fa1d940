#include "percbridge/basis_frame.hpp"

#include "percbridge/errors.hpp"

#include <cmath>

namespace percbridge {

BasisFrame::BasisFrame(Point direction_a) : a_(std::move(direction_a)) {
    require(!a_.empty(), Errc::dimension_mismatch, "direction must be non-empty");
    require(!is_zero(a_), Errc::invalid_argument, "direction must be nonzero");
    const int d = static_cast<int>(a_.size());
    a_norm_ = norm2(a_);

    VecD f1 = to_vecd(a_);
    for (auto& c : f1) c /= a_norm_;
    frame_.push_back(f1);

    // Gram-Schmidt over the standard basis, skipping near-dependent vectors
    for (int i = 0; i < d && static_cast<int>(frame_.size()) < d; ++i) {
        VecD v(d, 0.0);
        v[i] = 1.0;
        for (const auto& u : frame_) {
            double proj = dot(u, v);
            for (int c = 0; c < d; ++c) v[c] -= proj * u[c];
        }
        double nn = norm2(v);
        if (nn > 1e-9) {
            for (auto& c : v) c /= nn;
            frame_.push_back(v);
        }
    }
    require(static_cast<int>(frame_.size()) == d, Errc::invalid_argument,
            "failed to complete the orthonormal frame");
}

VecD BasisFrame::to_frame(const VecD& v) const {
    VecD out(frame_.size());
    for (size_t i = 0; i < frame_.size(); ++i) out[i] = dot(frame_[i], v);
    return out;
}

VecD BasisFrame::to_frame(const Point& v) const { return to_frame(to_vecd(v)); }

VecD BasisFrame::from_frame(const VecD& coords) const {
    VecD out(frame_.size(), 0.0);
    for (size_t i = 0; i < frame_.size(); ++i)
        for (size_t c = 0; c < frame_.size(); ++c) out[c] += coords[i] * frame_[i][c];
    return out;
}

VecD BasisFrame::transverse(const Point& v) const {
    VecD coords = to_frame(v);
    return VecD(coords.begin() + 1, coords.end());
}

std::pair<VecD, VecD> mean_decompose(const VecD& mu, const Point& a) {
    require(mu.size() == a.size(), Errc::dimension_mismatch,
            "mean and direction dimensions differ");
    require(!is_zero(a), Errc::invalid_argument, "direction must be nonzero");
    double aa = 0;
    for (auto c : a) aa += static_cast<double>(c) * static_cast<double>(c);
    double coeff = dot(mu, a) / aa;
    VecD mu_a(mu.size()), mu_or(mu.size());
    for (size_t i = 0; i < mu.size(); ++i) {
        mu_a[i] = coeff * static_cast<double>(a[i]);
        mu_or[i] = mu[i] - mu_a[i];
    }
    return {mu_a, mu_or};
}

} // namespace percbridge
