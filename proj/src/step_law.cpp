#include "percbridge/step_law.hpp"

#include "percbridge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace percbridge {

namespace {

constexpr double kSumTol = 1e-12;

void check_common(const std::vector<Point>& xs) {
    require(!xs.empty(), Errc::empty_support, "step law needs at least one atom");
    size_t d = xs.front().size();
    require(d >= 1, Errc::dimension_mismatch, "atoms must have dimension >= 1");
    for (const auto& x : xs)
        require(x.size() == d, Errc::dimension_mismatch, "all atoms must share one dimension");
    for (size_t i = 0; i + 1 < xs.size(); ++i)
        require(xs[i] != xs[i + 1], Errc::duplicate_support_vector,
                "duplicate support vector " + format_point(xs[i]));
}

} // namespace

StepLaw StepLaw::from_atoms(std::vector<std::pair<Point, double>> in) {
    std::sort(in.begin(), in.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Point> xs;
    xs.reserve(in.size());
    for (auto& [x, p] : in) xs.push_back(x);
    check_common(xs);

    double sum = 0.0;
    StepLaw law;
    for (auto& [x, p] : in) {
        require(p > 0.0, Errc::non_positive_probability,
                "probability of " + format_point(x) + " must be > 0");
        sum += p;
        law.atoms_.push_back({std::move(x), p});
    }
    require(std::abs(sum - 1.0) <= kSumTol, Errc::probability_sum_mismatch,
            "probabilities sum to " + std::to_string(sum));
    law.dim_ = static_cast<int>(law.atoms_.front().x.size());
    law.exact_ = false;
    law.derive_moments();
    return law;
}

StepLaw StepLaw::from_rational_atoms(std::vector<std::pair<Point, Rational>> in) {
    std::sort(in.begin(), in.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Point> xs;
    xs.reserve(in.size());
    for (auto& [x, p] : in) xs.push_back(x);
    check_common(xs);

    Rational sum(0);
    StepLaw law;
    for (auto& [x, p] : in) {
        require(p > 0, Errc::non_positive_probability,
                "probability of " + format_point(x) + " must be > 0");
        sum += p;
        law.atoms_.push_back({x, to_double(p)});
        law.rational_probs_.push_back(p);
    }
    require(sum == 1, Errc::probability_sum_mismatch,
            "probabilities sum to " + to_string(sum) + ", expected 1");
    law.dim_ = static_cast<int>(law.atoms_.front().x.size());
    law.exact_ = true;
    law.derive_moments();
    return law;
}

void StepLaw::derive_moments() {
    mean_.assign(dim_, 0.0);
    for (const auto& a : atoms_)
        for (int j = 0; j < dim_; ++j) mean_[j] += a.p * static_cast<double>(a.x[j]);
    cov_.assign(dim_, VecD(dim_, 0.0));
    for (const auto& a : atoms_)
        for (int j = 0; j < dim_; ++j)
            for (int k = 0; k < dim_; ++k)
                cov_[j][k] += a.p * (static_cast<double>(a.x[j]) - mean_[j]) *
                              (static_cast<double>(a.x[k]) - mean_[k]);
}

double StepLaw::variance_along(const VecD& u) const {
    VecD cu(dim_, 0.0);
    for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) cu[j] += cov_[j][k] * u[k];
    return dot(u, cu);
}

StepLaw::SpanResult StepLaw::span(const Point& direction) const {
    require(static_cast<int>(direction.size()) == dim_, Errc::dimension_mismatch,
            "direction dimension mismatch");
    std::vector<int64_t> proj;
    proj.reserve(atoms_.size());
    for (const auto& a : atoms_) proj.push_back(dot(a.x, direction));
    int64_t h = 0;
    for (size_t i = 1; i < proj.size(); ++i)
        h = std::gcd(h, std::abs(proj[i] - proj[0]));
    require(h > 0, Errc::zero_variance,
            "projected law is a point mass; span is undefined");
    int64_t b = ((proj[0] % h) + h) % h;
    return {h, b};
}

StepLaw::SpanResult StepLaw::span(int coordinate) const {
    require(coordinate >= 0 && coordinate < dim_, Errc::dimension_mismatch,
            "coordinate out of range");
    Point dir(dim_, 0);
    dir[coordinate] = 1;
    return span(dir);
}

StepLaw::SpanResult StepLaw::span_real(const VecD& direction) const {
    require(static_cast<int>(direction.size()) == dim_, Errc::dimension_mismatch,
            "direction dimension mismatch");
    Point rounded(dim_, 0);
    // projections must land on integers; tolerate float fuzz only
    std::vector<int64_t> proj;
    for (const auto& a : atoms_) {
        double v = dot(direction, a.x);
        double r = std::round(v);
        require(std::abs(v - r) <= 1e-9, Errc::non_lattice_projection,
                "projection of " + format_point(a.x) + " is not an integer");
        proj.push_back(static_cast<int64_t>(r));
    }
    int64_t h = 0;
    for (size_t i = 1; i < proj.size(); ++i)
        h = std::gcd(h, std::abs(proj[i] - proj[0]));
    require(h > 0, Errc::zero_variance,
            "projected law is a point mass; span is undefined");
    int64_t b = ((proj[0] % h) + h) % h;
    return {h, b};
}

double StepLaw::mgf(const VecD& theta) const {
    double m = 0.0;
    for (const auto& a : atoms_) m += a.p * std::exp(dot(theta, a.x));
    return m;
}

StepLaw StepLaw::tilted(const VecD& theta) const {
    require(static_cast<int>(theta.size()) == dim_, Errc::dimension_mismatch,
            "theta dimension mismatch");
    double m = mgf(theta);
    std::vector<std::pair<Point, double>> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.emplace_back(a.x, a.p * std::exp(dot(theta, a.x)) / m);
    return from_atoms(std::move(out));
}

StepLaw StepLaw::tilted_exact(const std::vector<Rational>& weights) const {
    require(exact_, Errc::invalid_argument, "tilted_exact needs a rational-mode law");
    require(static_cast<int>(weights.size()) == dim_, Errc::dimension_mismatch,
            "weight dimension mismatch");
    for (const auto& w : weights)
        require(w > 0, Errc::invalid_argument, "tilt weights must be positive");
    std::vector<std::pair<Point, Rational>> out;
    Rational total(0);
    for (size_t i = 0; i < atoms_.size(); ++i) {
        Rational w(1);
        for (int j = 0; j < dim_; ++j) w *= pow(weights[j], atoms_[i].x[j]);
        Rational q = rational_probs_[i] * w;
        total += q;
        out.emplace_back(atoms_[i].x, q);
    }
    for (auto& [x, q] : out) q /= total;
    return from_rational_atoms(std::move(out));
}

StepLaw StepLaw::parse(std::istream& in) {
    std::vector<std::pair<Point, Rational>> ratoms;
    std::vector<std::pair<Point, double>> datoms;
    bool all_rational = true;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tokens;
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
        if (tokens.empty()) continue;
        auto colon = std::find(tokens.begin(), tokens.end(), ":");
        require(colon != tokens.end() && colon != tokens.begin() && colon + 2 == tokens.end(),
                Errc::io_error, "expected 'dx dy ... : p', got: " + line);
        Point x;
        for (auto it = tokens.begin(); it != colon; ++it) {
            try {
                size_t pos = 0;
                x.push_back(std::stoll(*it, &pos));
                require(pos == it->size(), Errc::io_error, "bad coordinate: " + *it);
            } catch (const std::logic_error&) {
                fail(Errc::io_error, "bad coordinate: " + *it);
            }
        }
        const std::string& ptext = tokens.back();
        auto q = parse_rational(ptext);
        require(q.has_value(), Errc::io_error, "bad probability: " + ptext);
        ratoms.emplace_back(x, *q);
        datoms.emplace_back(x, to_double(*q));
        if (ptext.find('/') == std::string::npos && ptext.find('.') != std::string::npos &&
            ptext.size() > 8)
            all_rational = false; // long decimal: treat as a double entry
    }
    if (all_rational) {
        Rational sum(0);
        for (auto& [x, q] : ratoms) sum += q;
        if (sum == 1) return from_rational_atoms(std::move(ratoms));
    }
    return from_atoms(std::move(datoms));
}

StepLaw StepLaw::parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

void StepLaw::format(std::ostream& out) const {
    for (size_t i = 0; i < atoms_.size(); ++i) {
        out << format_point(atoms_[i].x) << " : ";
        if (exact_) {
            out << to_string(rational_probs_[i]);
        } else {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", atoms_[i].p);
            out << buf;
        }
        out << "\n";
    }
}

std::string StepLaw::format() const {
    std::ostringstream out;
    format(out);
    return out.str();
}

namespace {

// Interior test for the convex hull of integer points, in up to 3 hull
// dimensions. Support sets here are tiny, so brute force over facets is fine.
enum class HullPosition { interior, boundary_or_outside };

HullPosition hull_position_1d(const std::vector<VecD>& pts, const VecD& t) {
    double lo = pts[0][0], hi = pts[0][0];
    for (const auto& p : pts) {
        lo = std::min(lo, p[0]);
        hi = std::max(hi, p[0]);
    }
    const double eps = 1e-12 * std::max(1.0, hi - lo);
    return (t[0] > lo + eps && t[0] < hi - eps) ? HullPosition::interior
                                                : HullPosition::boundary_or_outside;
}

HullPosition hull_position_nd(const std::vector<VecD>& pts, const VecD& t, int d) {
    // Every facet of conv(pts) is spanned by d-1 affinely independent support
    // points; check the margin of t against each candidate halfspace.
    size_t m = pts.size();
    std::vector<size_t> idx(d - 1);
    double scale = 1.0;
    for (const auto& p : pts)
        for (double c : p) scale = std::max(scale, std::abs(c));
    const double eps = 1e-10 * scale;

    std::vector<size_t> comb(static_cast<size_t>(d) - 1);
    std::function<HullPosition(size_t, size_t)> rec = [&](size_t start,
                                                          size_t k) -> HullPosition {
        if (k == comb.size()) {
            // normal orthogonal to the affine span of the chosen points
            VecD base = pts[comb[0]];
            std::vector<VecD> span;
            for (size_t j = 1; j < comb.size(); ++j) {
                VecD v(d);
                for (int c = 0; c < d; ++c) v[c] = pts[comb[j]][c] - base[c];
                span.push_back(v);
            }
            VecD normal(d, 0.0);
            if (d == 2) {
                normal = {span[0][1], -span[0][0]};
            } else { // d == 3, cross product
                normal = {span[0][1] * span[1][2] - span[0][2] * span[1][1],
                          span[0][2] * span[1][0] - span[0][0] * span[1][2],
                          span[0][0] * span[1][1] - span[0][1] * span[1][0]};
            }
            double nn = norm2(normal);
            if (nn < 1e-12) return HullPosition::interior; // degenerate combo, skip
            for (auto& c : normal) c /= nn;
            double b = dot(normal, base);
            double mn = 0, mx = 0;
            for (const auto& p : pts) {
                double v = dot(normal, p) - b;
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            double tv = dot(normal, t) - b;
            // facet iff all points on one side of the hyperplane
            if (mx <= eps && tv > -eps) return HullPosition::boundary_or_outside;
            if (mn >= -eps && tv < eps) return HullPosition::boundary_or_outside;
            return HullPosition::interior;
        }
        for (size_t i = start; i < m; ++i) {
            comb[k] = i;
            if (rec(i + 1, k + 1) == HullPosition::boundary_or_outside)
                return HullPosition::boundary_or_outside;
        }
        return HullPosition::interior;
    };
    return rec(0, 0);
}

} // namespace

std::pair<TiltParameter, StepLaw> solve_tilt(const StepLaw& law, const VecD& target) {
    const int d = law.dim();
    require(static_cast<int>(target.size()) == d, Errc::dimension_mismatch,
            "target mean dimension mismatch");

    // Reduce to the affine hull of the support.
    const auto& atoms = law.atoms();
    VecD base = to_vecd(atoms.front().x);
    std::vector<VecD> dirs; // orthonormal basis of the hull directions
    for (size_t i = 1; i < atoms.size(); ++i) {
        VecD v = to_vecd(atoms[i].x);
        for (int c = 0; c < d; ++c) v[c] -= base[c];
        for (const auto& u : dirs) {
            double proj = dot(u, v);
            for (int c = 0; c < d; ++c) v[c] -= proj * u[c];
        }
        double nn = norm2(v);
        if (nn > 1e-9) {
            for (auto& c : v) c /= nn;
            dirs.push_back(v);
        }
    }
    int hd = static_cast<int>(dirs.size());

    // target must lie in the affine hull
    {
        VecD r(target);
        for (int c = 0; c < d; ++c) r[c] -= base[c];
        for (const auto& u : dirs) {
            double proj = dot(u, r);
            for (int c = 0; c < d; ++c) r[c] -= proj * u[c];
        }
        require(norm2(r) <= 1e-9, Errc::target_outside_hull,
                "target mean is outside the affine hull of the support");
    }

    auto project = [&](const VecD& v) {
        VecD out(hd);
        VecD r(v);
        for (int c = 0; c < d; ++c) r[c] -= base[c];
        for (int k = 0; k < hd; ++k) out[k] = dot(dirs[k], r);
        return out;
    };

    if (hd == 0) {
        // point mass; target equals the atom (checked above)
        return {TiltParameter{VecD(d, 0.0), 1.0}, law};
    }

    std::vector<VecD> hpts;
    hpts.reserve(atoms.size());
    for (const auto& a : atoms) hpts.push_back(project(to_vecd(a.x)));
    VecD ht = project(target);

    HullPosition pos = hd == 1 ? hull_position_1d(hpts, ht)
                               : hull_position_nd(hpts, ht, hd);
    require(pos == HullPosition::interior, Errc::target_outside_hull,
            "target mean is not in the interior of conv(support)");

    // Newton with backtracking on phi(th) = log sum p_i exp(th.y_i) - th.ht,
    // in hull coordinates; phi is smooth and strictly convex here.
    VecD th(hd, 0.0);
    auto eval = [&](const VecD& t, VecD& grad, std::vector<VecD>& hess) {
        double mx = -1e300;
        std::vector<double> expo(atoms.size());
        for (size_t i = 0; i < atoms.size(); ++i) {
            expo[i] = dot(t, hpts[i]);
            mx = std::max(mx, expo[i]);
        }
        double z = 0;
        std::vector<double> w(atoms.size());
        for (size_t i = 0; i < atoms.size(); ++i) {
            w[i] = atoms[i].p * std::exp(expo[i] - mx);
            z += w[i];
        }
        VecD mean(hd, 0.0);
        for (size_t i = 0; i < atoms.size(); ++i)
            for (int k = 0; k < hd; ++k) mean[k] += w[i] / z * hpts[i][k];
        grad.assign(hd, 0.0);
        for (int k = 0; k < hd; ++k) grad[k] = mean[k] - ht[k];
        hess.assign(hd, VecD(hd, 0.0));
        for (size_t i = 0; i < atoms.size(); ++i)
            for (int k = 0; k < hd; ++k)
                for (int l = 0; l < hd; ++l)
                    hess[k][l] += w[i] / z * (hpts[i][k] - mean[k]) * (hpts[i][l] - mean[l]);
        return std::log(z) + mx - dot(t, ht);
    };

    auto solve_sym = [&](std::vector<VecD> A, VecD b) -> std::optional<VecD> {
        int n = static_cast<int>(b.size());
        for (int c = 0; c < n; ++c) {
            int piv = c;
            for (int r = c + 1; r < n; ++r)
                if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
            if (std::abs(A[piv][c]) < 1e-14) return std::nullopt;
            std::swap(A[piv], A[c]);
            std::swap(b[piv], b[c]);
            for (int r = 0; r < n; ++r) {
                if (r == c) continue;
                double f = A[r][c] / A[c][c];
                for (int k = c; k < n; ++k) A[r][k] -= f * A[c][k];
                b[r] -= f * b[c];
            }
        }
        for (int c = 0; c < n; ++c) b[c] /= A[c][c];
        return b;
    };

    VecD grad;
    std::vector<VecD> hess;
    double phi = eval(th, grad, hess);
    bool newton_ok = false;
    for (int it = 0; it < 200; ++it) {
        if (norm2(grad) <= 1e-13) {
            newton_ok = true;
            break;
        }
        VecD nb(hd);
        for (int k = 0; k < hd; ++k) nb[k] = -grad[k];
        auto step = solve_sym(hess, nb);
        if (!step) break;
        double alpha = 1.0;
        double g_dot_s = dot(grad, *step);
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            VecD cand(hd);
            for (int k = 0; k < hd; ++k) cand[k] = th[k] + alpha * (*step)[k];
            VecD g2;
            std::vector<VecD> h2;
            double phi2 = eval(cand, g2, h2);
            if (phi2 <= phi + 1e-4 * alpha * g_dot_s) {
                th = cand;
                phi = phi2;
                grad = g2;
                hess = h2;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved) break;
    }
    if (!newton_ok && norm2(grad) <= 1e-13) newton_ok = true;

    if (!newton_ok && hd == 1) {
        // robust 1-d fallback: tilted mean is monotone in theta
        auto mean_at = [&](double t) {
            VecD g;
            std::vector<VecD> h;
            eval(VecD{t}, g, h);
            return g[0];
        };
        double lo = -1, hi = 1;
        while (mean_at(lo) > 0) lo *= 2;
        while (mean_at(hi) < 0) hi *= 2;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (mean_at(mid) < 0 ? lo : hi) = mid;
        }
        th = {0.5 * (lo + hi)};
        newton_ok = true;
    }
    require(newton_ok, Errc::no_convergence, "tilt solver exhausted its iteration budget");

    // back to ambient coordinates
    VecD theta(d, 0.0);
    for (int k = 0; k < hd; ++k)
        for (int c = 0; c < d; ++c) theta[c] += th[k] * dirs[k][c];
    StepLaw tilted = law.tilted(theta);

    // post: tilted mean hits the target to 1e-10
    double err = 0;
    for (int c = 0; c < d; ++c) err = std::max(err, std::abs(tilted.mean()[c] - target[c]));
    require(err <= 1e-10, Errc::no_convergence,
            "tilted mean misses target by " + std::to_string(err));
    return {TiltParameter{theta, law.mgf(theta)}, tilted};
}

} // namespace percbridge
