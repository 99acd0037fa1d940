#ifndef PERCBRIDGE_BRIDGE_TABLES_HPP
#define PERCBRIDGE_BRIDGE_TABLES_HPP

#include "percbridge/errors.hpp"
#include "percbridge/point.hpp"
#include "percbridge/rational.hpp"
#include "percbridge/rng.hpp"
#include "percbridge/step_law.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace percbridge {

/// Lattice path S_0 = 0, S_1, ..., S_k pinned at its last point.
struct BridgePath {
    std::vector<Point> points;
    Point pinned_at;

    size_t steps() const { return points.empty() ? 0 : points.size() - 1; }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
};

// Checks the BridgePath invariants against the law that produced it.
void validate_bridge_path(const BridgePath& path, const StepLaw& law);

namespace detail {

template <class S>
struct ScalarOps {
    static S zero() { return S(0); }
    static S one() { return S(1); }
    static double to_d(const S& v) { return static_cast<double>(v); }
    static S from_prob(const StepLaw& law, size_t atom) {
        return S(law.atoms()[atom].p);
    }
};

template <>
struct ScalarOps<Rational> {
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static double to_d(const Rational& v) { return to_double(v); }
    static Rational from_prob(const StepLaw& law, size_t atom) {
        require(law.exact(), Errc::invalid_argument,
                "rational bridge tables need a rational-mode law");
        return law.rational_probs()[atom];
    }
};

// floor(x*n) and the fractional remainder eps = x*n - floor(x*n)
inline void split_grid(double x, int64_t n, int64_t& idx, double& eps) {
    double v = x * static_cast<double>(n);
    idx = static_cast<int64_t>(std::floor(v + 1e-12));
    eps = v - static_cast<double>(idx);
    if (eps < 1e-12) eps = 0.0;
}

inline void split_grid(const Rational& x, int64_t n, int64_t& idx, Rational& eps) {
    Rational v = x * Rational(static_cast<long>(n));
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), v.get_num().get_mpz_t(), v.get_den().get_mpz_t());
    idx = q.get_si();
    eps = v - Rational(q);
}

} // namespace detail

/// Exact conditional law of a walk pinned at `endpoint` after n steps.
///
/// Holds unconditioned forward tables F_i(x) = P[S_i = x], pruned to states
/// that can still reach the endpoint; backward probabilities come from the
/// same array via P[S_n = e | S_i = x] = F_{n-i}(e - x). Construction is
/// sequential; built instances are immutable and safe to query from many
/// threads.
template <class S>
class BridgeTables {
  public:
    BridgeTables(const StepLaw& law, int64_t n, Point endpoint,
                 size_t state_budget = 100000000)
        : law_(law), n_(n), endpoint_(std::move(endpoint)) {
        require(n_ >= 0, Errc::invalid_argument, "n must be >= 0");
        require(static_cast<int>(endpoint_.size()) == law.dim(), Errc::dimension_mismatch,
                "endpoint dimension mismatch");
        build(state_budget);
    }

    int64_t steps() const { return n_; }
    const Point& endpoint() const { return endpoint_; }
    const StepLaw& law() const { return law_; }

    // P[S_n = endpoint]
    const S& total_probability() const { return total_; }

    // F_i(x); zero when the state cannot both occur and reach the endpoint
    S forward(int64_t i, const Point& x) const {
        const Slice& sl = slices_[static_cast<size_t>(i)];
        auto it = std::lower_bound(sl.xs.begin(), sl.xs.end(), x);
        if (it == sl.xs.end() || *it != x) return detail::ScalarOps<S>::zero();
        return sl.ps[static_cast<size_t>(it - sl.xs.begin())];
    }

    // P[S_n = endpoint | S_i = x]
    S backward(int64_t i, const Point& x) const { return forward(n_ - i, sub(endpoint_, x)); }

    // conditional marginal P[S_i = . | S_n = endpoint]
    std::vector<std::pair<Point, S>> marginal(int64_t i) const {
        check_slice(i);
        const Slice& sl = slices_[static_cast<size_t>(i)];
        std::vector<std::pair<Point, S>> out;
        out.reserve(sl.xs.size());
        for (size_t j = 0; j < sl.xs.size(); ++j) {
            S b = backward(i, sl.xs[j]);
            if (b == detail::ScalarOps<S>::zero()) continue;
            out.emplace_back(sl.xs[j], sl.ps[j] * b / total_);
        }
        return out;
    }

    // E[S_{i,c} | pinned]
    S conditional_mean(int64_t i, int coordinate) const {
        check_slice(i);
        S acc = detail::ScalarOps<S>::zero();
        for (const auto& [x, p] : marginal(i))
            acc += p * S(static_cast<long>(x[static_cast<size_t>(coordinate)]));
        return acc;
    }

    // centered Cov(S_{i,c}, S_{j,c} | pinned), i <= j
    S conditional_cov(int64_t i, int64_t j, int coordinate) const;

    // Cov(X_n(i/n), X_n(j/n)) = Cov(S_i, S_j)/n for the 1/sqrt(n)-scaled walk
    S cov_scaled_grid(int64_t i, int64_t j, int coordinate) const {
        return conditional_cov(i, j, coordinate) / S(static_cast<long>(n_));
    }

    // Exact covariance of the interpolated scaled process at times s <= t,
    // bilinear in each grid cell.
    S cov_scaled_interpolated(const S& s, const S& t, int coordinate) const;

    // Exact sequential sample of the conditional path law.
    BridgePath sample(Rng& rng) const;

  private:
    struct Slice {
        std::vector<Point> xs; // sorted
        std::vector<S> ps;
    };

    void check_slice(int64_t i) const {
        require(i >= 0 && i <= n_, Errc::invalid_argument, "slice index out of range");
    }

    void build(size_t state_budget);

    StepLaw law_;
    int64_t n_;
    Point endpoint_;
    std::vector<Slice> slices_;
    S total_ = detail::ScalarOps<S>::zero();
    // componentwise step bounds, for reachability pruning
    Point step_min_, step_max_;
};

template <class S>
void BridgeTables<S>::build(size_t state_budget) {
    const int d = law_.dim();
    step_min_.assign(d, INT64_MAX);
    step_max_.assign(d, INT64_MIN);
    for (const auto& a : law_.atoms())
        for (int c = 0; c < d; ++c) {
            step_min_[c] = std::min(step_min_[c], a.x[c]);
            step_max_[c] = std::max(step_max_[c], a.x[c]);
        }

    auto can_reach_endpoint = [&](const Point& x, int64_t steps_left) {
        for (int c = 0; c < d; ++c) {
            int64_t gap = endpoint_[c] - x[c];
            if (gap < steps_left * step_min_[c] || gap > steps_left * step_max_[c]) return false;
        }
        return true;
    };

    slices_.resize(static_cast<size_t>(n_) + 1);
    size_t states = 0;

    std::map<Point, S> cur;
    cur[Point(d, 0)] = detail::ScalarOps<S>::one();
    for (int64_t i = 0;; ++i) {
        Slice& sl = slices_[static_cast<size_t>(i)];
        sl.xs.reserve(cur.size());
        sl.ps.reserve(cur.size());
        for (auto& [x, p] : cur) {
            sl.xs.push_back(x);
            sl.ps.push_back(p);
        }
        states += cur.size();
        require(states <= state_budget, Errc::table_budget_exceeded,
                "bridge DP exceeds the state budget");
        if (i == n_) break;

        std::map<Point, S> next;
        for (size_t j = 0; j < sl.xs.size(); ++j) {
            for (size_t ai = 0; ai < law_.atoms().size(); ++ai) {
                Point nx = add(sl.xs[j], law_.atoms()[ai].x);
                if (!can_reach_endpoint(nx, n_ - i - 1)) continue;
                S w = sl.ps[j] * detail::ScalarOps<S>::from_prob(law_, ai);
                auto [it, inserted] = next.try_emplace(std::move(nx), w);
                if (!inserted) it->second += w;
            }
        }
        cur = std::move(next);
    }

    total_ = forward(n_, endpoint_);
    require(!(total_ == detail::ScalarOps<S>::zero()), Errc::unreachable_endpoint,
            "endpoint " + format_point(endpoint_) + " unreachable in " + std::to_string(n_) +
                " steps");
}

template <class S>
S BridgeTables<S>::conditional_cov(int64_t i, int64_t j, int coordinate) const {
    check_slice(i);
    check_slice(j);
    require(i <= j, Errc::invalid_argument, "need i <= j");
    const size_t c = static_cast<size_t>(coordinate);
    const S zero = detail::ScalarOps<S>::zero();

    if (i == j) {
        S m = conditional_mean(i, coordinate);
        S acc = zero;
        for (const auto& [x, p] : marginal(i)) {
            S v = S(static_cast<long>(x[c])) - m;
            acc += p * v * v;
        }
        return acc;
    }

    // E[S_i S_j | pin] via the two-slice joint law
    const Slice& si = slices_[static_cast<size_t>(i)];
    S exy = zero;
    for (size_t u = 0; u < si.xs.size(); ++u) {
        const Point& x = si.xs[u];
        const S& fx = si.ps[u];
        if (fx == zero) continue;
        const Slice& sj = slices_[static_cast<size_t>(j)];
        for (size_t v = 0; v < sj.xs.size(); ++v) {
            const Point& y = sj.xs[v];
            // step probability from x to y in j-i unconditioned steps
            S mid = forward(j - i, sub(y, x));
            if (mid == zero) continue;
            S back = backward(j, y);
            if (back == zero) continue;
            exy += fx * mid * back *
                   S(static_cast<long>(x[c])) * S(static_cast<long>(y[c]));
        }
    }
    exy /= total_;
    return exy - conditional_mean(i, coordinate) * conditional_mean(j, coordinate);
}

template <class S>
S BridgeTables<S>::cov_scaled_interpolated(const S& s, const S& t, int coordinate) const {
    const S zero = detail::ScalarOps<S>::zero();
    const S one = detail::ScalarOps<S>::one();
    require(!(s < zero) && !(t < s) && !(one < t), Errc::invalid_argument,
            "need 0 <= s <= t <= 1");
    int64_t i0, j0;
    S e1, e2;
    detail::split_grid(s, n_, i0, e1);
    detail::split_grid(t, n_, j0, e2);
    if (i0 >= n_) {
        i0 = n_;
        e1 = zero;
    }
    if (j0 >= n_) {
        j0 = n_;
        e2 = zero;
    }
    auto knot = [&](int64_t a, int64_t b) {
        if (a > b) std::swap(a, b);
        return cov_scaled_grid(a, b, coordinate);
    };
    S c00 = knot(i0, j0);
    S c01 = (e2 == zero) ? c00 : knot(i0, j0 + 1);
    S c10 = (e1 == zero) ? c00 : knot(i0 + 1, j0);
    S c11 = (e1 == zero || e2 == zero) ? c00 : knot(i0 + 1, j0 + 1);
    return (one - e1) * (one - e2) * c00 + (one - e1) * e2 * c01 + e1 * (one - e2) * c10 +
           e1 * e2 * c11;
}

template <class S>
BridgePath BridgeTables<S>::sample(Rng& rng) const {
    BridgePath path;
    path.pinned_at = endpoint_;
    path.points.reserve(static_cast<size_t>(n_) + 1);
    Point cur(law_.dim(), 0);
    path.points.push_back(cur);
    std::vector<double> weights(law_.atoms().size());
    for (int64_t i = 0; i < n_; ++i) {
        double total = 0.0;
        for (size_t ai = 0; ai < law_.atoms().size(); ++ai) {
            Point nx = add(cur, law_.atoms()[ai].x);
            weights[ai] =
                law_.atoms()[ai].p * detail::ScalarOps<S>::to_d(backward(i + 1, nx));
            total += weights[ai];
        }
        size_t pick = rng.categorical(weights, total);
        cur = add(cur, law_.atoms()[pick].x);
        path.points.push_back(cur);
    }
    return path;
}

/// Lemma-style covariance prediction for the pinned scaled walk:
/// C_n s(1-t) when [ns] < [nt], minus the same-cell correction otherwise.
template <class S>
S covariance_prediction(const S& s, const S& t, int64_t n, const S& cn) {
    const S zero = detail::ScalarOps<S>::zero();
    const S one = detail::ScalarOps<S>::one();
    require(!(s < zero) && !(t < s) && !(one < t), Errc::invalid_argument,
            "need 0 <= s <= t <= 1");
    int64_t i0, j0;
    S e1, e2;
    detail::split_grid(s, n, i0, e1);
    detail::split_grid(t, n, j0, e2);
    if (i0 >= n) {
        i0 = n;
        e1 = zero;
    }
    if (j0 >= n) {
        j0 = n;
        e2 = zero;
    }
    S base = cn * s * (one - t);
    if (i0 < j0) return base;
    return base - cn * e1 * (one - e2) / S(static_cast<long>(n));
}

/// C_n estimate with its limit C = sigma^2 (the step variance along the
/// coordinate when the mean is zero).
struct CnEstimate {
    int64_t n = 0;
    double value = 0.0;
    std::optional<Rational> exact;
    double limit = 0.0;
    double se = 0.0; // 0 for exact backends
};

// Exact C_n from DP tables per the parity-split midpoint formula.
template <class S>
CnEstimate estimate_cn(const BridgeTables<S>& tables, int coordinate = 0) {
    const int64_t n = tables.steps();
    require(n >= 2, Errc::invalid_argument, "C_n needs n >= 2");
    S value;
    if (n % 2 == 0) {
        S var = tables.conditional_cov(n / 2, n / 2, coordinate);
        value = S(4) * var / S(static_cast<long>(n));
    } else {
        int64_t m = (n - 1) / 2;
        S vm = tables.conditional_cov(m, m, coordinate);
        S vm1 = tables.conditional_cov(m + 1, m + 1, coordinate);
        S cross = tables.conditional_cov(m, m + 1, coordinate);
        // X(n/2) = (S_m + S_{m+1})/2, odd-n correction n/(n-1)
        S var_mid = (vm + S(2) * cross + vm1) / S(4);
        value = S(4) * var_mid / S(static_cast<long>(n)) * S(static_cast<long>(n)) /
                S(static_cast<long>(n - 1));
    }
    CnEstimate est;
    est.n = n;
    est.value = detail::ScalarOps<S>::to_d(value);
    if constexpr (std::is_same_v<S, Rational>) est.exact = value;
    VecD u(tables.law().dim(), 0.0);
    u[static_cast<size_t>(coordinate)] = 1.0;
    est.limit = tables.law().variance_along(u);
    return est;
}

// Monte Carlo C_n from sampled midpoint values X_n(1/2) of pinned bridges.
CnEstimate estimate_cn_mc(const std::vector<double>& midpoint_values, int64_t n);

// Rejection sampler over free walks; exact but exponentially slow. Kept as an
// independent cross-check of the DP sampler.
BridgePath sample_bridge_rejection(const StepLaw& law, int64_t n, const Point& endpoint,
                                   Rng& rng, uint64_t max_attempts = 100000000);

} // namespace percbridge

#endif
