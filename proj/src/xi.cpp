#include "percbridge/xi.hpp"

#include "percbridge/errors.hpp"
#include "percbridge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace percbridge {

namespace {

// Box around the segment [0, n*dir] with `margin` clearance per coordinate.
struct Box {
    Point lo, hi;     // inclusive
    std::vector<int64_t> stride;
    int64_t vertices = 1;
    int dim;

    Box(int d, const Point& target, int64_t margin) : dim(d) {
        lo.resize(static_cast<size_t>(d));
        hi.resize(static_cast<size_t>(d));
        stride.resize(static_cast<size_t>(d));
        for (int c = 0; c < d; ++c) {
            lo[static_cast<size_t>(c)] = std::min<int64_t>(0, target[static_cast<size_t>(c)]) - margin;
            hi[static_cast<size_t>(c)] = std::max<int64_t>(0, target[static_cast<size_t>(c)]) + margin;
        }
        for (int c = d - 1; c >= 0; --c) {
            stride[static_cast<size_t>(c)] = vertices;
            vertices *= hi[static_cast<size_t>(c)] - lo[static_cast<size_t>(c)] + 1;
        }
    }

    int64_t id(const Point& z) const {
        int64_t v = 0;
        for (int c = 0; c < dim; ++c)
            v += (z[static_cast<size_t>(c)] - lo[static_cast<size_t>(c)]) * stride[static_cast<size_t>(c)];
        return v;
    }
    bool contains_shift(const Point& z, int axis, int64_t delta) const {
        int64_t v = z[static_cast<size_t>(axis)] + delta;
        return v >= lo[static_cast<size_t>(axis)] && v <= hi[static_cast<size_t>(axis)];
    }
};

// One attempt: grow the cluster of 0, return true if it reaches target.
bool reaches(const Box& box, const Point& target, double p, Rng& rng,
             std::vector<uint32_t>& vert_gen, std::vector<uint32_t>& edge_gen,
             std::vector<uint8_t>& edge_open, std::vector<int64_t>& queue,
             std::vector<Point>& pts, uint32_t gen) {
    const int d = box.dim;
    const int64_t target_id = box.id(target);
    Point zero(static_cast<size_t>(d), 0);
    int64_t zero_id = box.id(zero);
    if (zero_id == target_id) return true;

    queue.clear();
    pts.clear();
    vert_gen[static_cast<size_t>(zero_id)] = gen;
    queue.push_back(zero_id);
    pts.push_back(zero);
    size_t head = 0;
    while (head < queue.size()) {
        int64_t vid = queue[head];
        Point z = pts[head];
        ++head;
        for (int c = 0; c < d; ++c) {
            for (int64_t delta = -1; delta <= 1; delta += 2) {
                if (!box.contains_shift(z, c, delta)) continue;
                int64_t nid = vid + delta * box.stride[static_cast<size_t>(c)];
                // edge id: lower endpoint along axis c
                int64_t eid = (delta > 0 ? vid : nid) * d + c;
                if (edge_gen[static_cast<size_t>(eid)] != gen) {
                    edge_gen[static_cast<size_t>(eid)] = gen;
                    edge_open[static_cast<size_t>(eid)] = rng.bernoulli(p) ? 1 : 0;
                }
                if (!edge_open[static_cast<size_t>(eid)]) continue;
                if (vert_gen[static_cast<size_t>(nid)] == gen) continue;
                if (nid == target_id) return true;
                vert_gen[static_cast<size_t>(nid)] = gen;
                queue.push_back(nid);
                Point nz = z;
                nz[static_cast<size_t>(c)] += delta;
                pts.push_back(nz);
            }
        }
    }
    return false;
}

} // namespace

XiEstimate estimate_xi(int dim, double p, const Point& direction,
                       const std::vector<int64_t>& n_range, uint64_t samples, uint64_t seed,
                       int64_t margin, bool parallel) {
    require(dim >= 2, Errc::invalid_argument, "need dim >= 2");
    require(p > 0.0 && p < 1.0, Errc::invalid_argument, "p must be in (0,1)");
    require(static_cast<int>(direction.size()) == dim && !is_zero(direction),
            Errc::invalid_argument, "direction must be nonzero");
    require(n_range.size() >= 2, Errc::invalid_argument, "need at least two n values");
    require(samples >= 1, Errc::invalid_argument, "need samples >= 1");

    XiEstimate est;
    est.ns = n_range;
    est.samples_per_n = samples;
    est.hits.assign(n_range.size(), 0);
    est.p_hat.assign(n_range.size(), 0.0);

    for (size_t ni = 0; ni < n_range.size(); ++ni) {
        const Point target = scale(direction, n_range[ni]);
        const Box box(dim, target, margin);
        uint64_t hits = 0;

#pragma omp parallel if (parallel) reduction(+ : hits)
        {
            std::vector<uint32_t> vert_gen(static_cast<size_t>(box.vertices), 0);
            std::vector<uint32_t> edge_gen(static_cast<size_t>(box.vertices * dim), 0);
            std::vector<uint8_t> edge_open(static_cast<size_t>(box.vertices * dim), 0);
            std::vector<int64_t> queue;
            std::vector<Point> pts;
            uint32_t gen = 0;
#pragma omp for schedule(static)
            for (int64_t s = 0; s < static_cast<int64_t>(samples); ++s) {
                Rng rng = Rng::stream(seed, static_cast<uint64_t>(ni) * samples +
                                                static_cast<uint64_t>(s));
                ++gen;
                if (reaches(box, target, p, rng, vert_gen, edge_gen, edge_open, queue, pts,
                            gen))
                    ++hits;
            }
        }
        est.hits[ni] = hits;
        est.p_hat[ni] = static_cast<double>(hits) / static_cast<double>(samples);
        require(hits > 0, Errc::insufficient_acceptances,
                "no connection observed at n = " + std::to_string(n_range[ni]) +
                    "; raise samples or shrink n_range");
    }

    // weighted least squares of -log p_hat against n;
    // Var[log p_hat] ~ (1-p)/(N p) from the binomial delta method
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (size_t i = 0; i < n_range.size(); ++i) {
        double x = static_cast<double>(n_range[i]);
        double y = -std::log(est.p_hat[i]);
        double var = (1.0 - est.p_hat[i]) /
                     (static_cast<double>(samples) * est.p_hat[i]);
        double w = var > 0 ? 1.0 / var : 1e12;
        sw += w;
        swx += w * x;
        swy += w * y;
        swxx += w * x * x;
        swxy += w * x * y;
    }
    double denom = sw * swxx - swx * swx;
    require(std::abs(denom) > 1e-12, Errc::degenerate_fit, "xi fit is degenerate");
    est.xi = (sw * swxy - swx * swy) / denom;
    est.intercept = (swy - est.xi * swx) / sw;
    est.se = std::sqrt(sw / denom);
    return est;
}

} // namespace percbridge
