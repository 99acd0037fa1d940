#include "percbridge/stat_tests.hpp"

#include "percbridge/errors.hpp"
#include "percbridge/rng.hpp"

#include <algorithm>
#include <cmath>

namespace percbridge {

TestReport TestReport::make(std::string test, std::string claim, std::string null_desc,
                            double statistic, double threshold, Direction dir,
                            uint64_t n_samples) {
    TestReport r;
    r.test = std::move(test);
    r.claim = std::move(claim);
    r.null_desc = std::move(null_desc);
    r.statistic = statistic;
    r.threshold = threshold;
    r.direction = dir;
    r.pass = dir == Direction::at_most ? statistic <= threshold : statistic >= threshold;
    r.n_samples = n_samples;
    return r;
}

CovarianceEstimate empirical_covariance(const SummaryStats& stats, double s, double t,
                                        int coordinate) {
    const size_t si = stats.grid_index(s);
    const size_t ti = stats.grid_index(t);
    const size_t lo = std::min(si, ti), hi = std::max(si, ti);
    const uint64_t n = stats.count();
    require(n >= 2, Errc::too_few_samples, "covariance needs at least two samples");
    const double nn = static_cast<double>(n);
    const double sx = stats.sum(lo, coordinate);
    const double sy = stats.sum(hi, coordinate);
    const double sxy = stats.cross(lo, hi, coordinate);
    const double divisor = stats.exhaustive ? nn : nn - 1.0;

    CovarianceEstimate est;
    est.value = (sxy - sx * sy / nn) / divisor;
    if (stats.exhaustive) return est; // population law: no sampling error

    if (stats.retains_raw()) {
        // exact leave-one-out jackknife
        const auto& raw = stats.raw();
        const int vd = stats.value_dim();
        auto val = [&](size_t i, size_t tt) {
            return raw[i][tt * static_cast<size_t>(vd) + static_cast<size_t>(coordinate)];
        };
        std::vector<double> loo(raw.size());
        double loo_mean = 0.0;
        const double m = nn - 1.0;
        for (size_t i = 0; i < raw.size(); ++i) {
            double x = val(i, lo), y = val(i, hi);
            loo[i] = ((sxy - x * y) - (sx - x) * (sy - y) / m) / (m - 1.0);
            loo_mean += loo[i];
        }
        loo_mean /= nn;
        double ss = 0.0;
        for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
        est.se = std::sqrt(ss * (nn - 1.0) / nn);
    } else {
        // influence-function expansion from stored moments
        const double a = sx / nn, b = sy / nn;
        const double su2 = stats.cross_x2y2(lo, hi, coordinate) -
                           2.0 * a * stats.cross_xy2(lo, hi, coordinate) -
                           2.0 * b * stats.cross_x2y(lo, hi, coordinate) +
                           a * a * stats.sum2(hi, coordinate) +
                           b * b * stats.sum2(lo, coordinate) +
                           4.0 * a * b * stats.cross(lo, hi, coordinate) -
                           2.0 * a * a * b * sy - 2.0 * a * b * b * sx + nn * a * a * b * b;
        const double m2 = (sxy - sx * sy / nn) / nn;
        const double var_u = std::max(0.0, su2 / nn - m2 * m2);
        est.se = std::sqrt(var_u / (nn - 1.0));
    }
    return est;
}

TestReport bridge_covariance_test(const SummaryStats& stats, int64_t n, int coordinate,
                                  double threshold) {
    const VecD& grid = stats.grid();
    require(grid.size() >= 5, Errc::degenerate_fit, "need at least three interior grid times");

    struct Pair {
        double s, t, cov, se;
    };
    std::vector<Pair> pairs;
    for (size_t i = 1; i + 1 < grid.size(); ++i) {
        for (size_t j = i; j + 1 < grid.size(); ++j) {
            double s = grid[i], t = grid[j];
            if (std::floor(s * static_cast<double>(n) + 1e-12) >=
                std::floor(t * static_cast<double>(n) + 1e-12) && i != j)
                continue;
            if (i == j && std::abs(s - t) > 1e-12) continue;
            auto est = empirical_covariance(stats, s, t, coordinate);
            pairs.push_back({s, t, est.value, est.se});
        }
    }
    require(pairs.size() >= 3, Errc::degenerate_fit, "too few usable grid pairs");

    // weighted LS for the single scale C in cov = C s(1-t)
    double num = 0.0, den = 0.0;
    for (const auto& p : pairs) {
        double shape = p.s * (1.0 - p.t);
        double w = (p.se > 0) ? 1.0 / (p.se * p.se) : 1.0;
        num += w * shape * p.cov;
        den += w * shape * shape;
    }
    require(den > 0, Errc::degenerate_fit, "degenerate covariance shape fit");
    const double c_fit = num / den;

    double worst = 0.0;
    double worst_rel = 0.0;
    for (const auto& p : pairs) {
        double model = c_fit * p.s * (1.0 - p.t);
        double resid = p.cov - model;
        double z = p.se > 0 ? std::abs(resid) / p.se : (resid == 0.0 ? 0.0 : 1e18);
        worst = std::max(worst, z);
        if (std::abs(model) > 1e-300)
            worst_rel = std::max(worst_rel, std::abs(resid / model));
    }

    auto report = TestReport::make(
        "bridge_covariance", "covariance-identity", "Cov(s,t) = C s(1-t) on the grid", worst,
        threshold, TestReport::Direction::at_most, stats.count());
    report.details["c_fit"] = c_fit;
    report.details["max_relative_residual"] = worst_rel;
    report.details["pairs"] = static_cast<double>(pairs.size());

    // scale-free ratio checks on the canonical pairs, usable when C is unknown
    auto has = [&](double t) {
        for (double g : grid)
            if (std::abs(g - t) <= 1e-12) return true;
        return false;
    };
    if (has(0.25) && has(0.5) && has(0.75)) {
        double c12 = empirical_covariance(stats, 0.25, 0.5, coordinate).value;
        double c13 = empirical_covariance(stats, 0.25, 0.75, coordinate).value;
        double c23 = empirical_covariance(stats, 0.5, 0.75, coordinate).value;
        if (c13 != 0.0 && c23 != 0.0) {
            report.details["ratio_12_over_13"] = c12 / c13;        // model: 2
            report.details["ratio_12_over_23"] = c12 / c23;        // model: 1/2
            report.details["ratio_13_over_23"] = c13 / c23;        // model: 1/4
        }
    }
    return report;
}

double ks_asymptotic_pvalue(double lambda) {
    if (lambda < 0.03) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 101; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_against_normal(const std::map<double, uint64_t>& hist, double variance) {
    require(variance > 0, Errc::zero_variance, "null variance must be positive");
    KsResult out;
    for (const auto& [v, c] : hist) out.n += c;
    require(out.n >= 2, Errc::too_few_samples, "empty histogram");
    const double sigma = std::sqrt(variance);
    auto cdf = [&](double x) { return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0))); };

    std::vector<std::pair<double, uint64_t>> atoms(hist.begin(), hist.end());
    // lattice detection: all gaps close to integer multiples of the smallest
    double delta = 0.0;
    bool lattice = atoms.size() >= 2 && atoms.size() <= 65536;
    if (lattice) {
        delta = atoms[1].first - atoms[0].first;
        for (size_t i = 1; i + 1 < atoms.size(); ++i)
            delta = std::min(delta, atoms[i + 1].first - atoms[i].first);
        for (size_t i = 0; i + 1 < atoms.size(); ++i) {
            double g = atoms[i + 1].first - atoms[i].first;
            double m = std::round(g / delta);
            if (std::abs(g - m * delta) > 1e-6 * delta) {
                lattice = false;
                break;
            }
        }
        // many distinct values relative to the sample size: treat as continuous
        if (atoms.size() * 4 > out.n) lattice = false;
    }
    out.discrete_null = lattice;

    const double nn = static_cast<double>(out.n);
    double cum = 0.0;
    double d = 0.0;
    for (const auto& [v, c] : atoms) {
        double f_lo = cum / nn;
        cum += static_cast<double>(c);
        double f_hi = cum / nn;
        if (lattice) {
            d = std::max(d, std::abs(f_lo - cdf(v - 0.5 * delta)));
            d = std::max(d, std::abs(f_hi - cdf(v + 0.5 * delta)));
        } else {
            d = std::max(d, std::abs(f_lo - cdf(v)));
            d = std::max(d, std::abs(f_hi - cdf(v)));
        }
    }
    out.statistic = d;
    const double root = std::sqrt(nn);
    out.p_value = ks_asymptotic_pvalue((root + 0.12 + 0.11 / root) * d);
    return out;
}

TestReport marginal_gaussian_test(const SummaryStats& stats, double t, double c_scale,
                                  int coordinate, double p_threshold) {
    const size_t ti = stats.grid_index(t);
    require(stats.count() >= 100, Errc::too_few_samples,
            "marginal KS needs at least 100 samples");
    const double model_var = t * (1.0 - t) * c_scale;
    require(model_var > 0, Errc::zero_variance,
            "model variance vanishes at t = " + std::to_string(t));
    KsResult ks = ks_test_against_normal(stats.marginal_hist(ti, coordinate), model_var);
    auto report = TestReport::make(
        "marginal_gaussian", "gaussian-marginal",
        "marginal at t converges to N(0, t(1-t)C)", ks.p_value, p_threshold,
        TestReport::Direction::at_least, stats.count());
    report.details["ks_statistic"] = ks.statistic;
    report.details["t"] = t;
    report.details["model_variance"] = model_var;
    report.details["discrete_null"] = ks.discrete_null ? 1.0 : 0.0;
    return report;
}

TestReport increment_tail_test(const std::map<double, uint64_t>& norm_hist) {
    uint64_t total = 0;
    for (const auto& [v, c] : norm_hist) total += c;
    require(total >= 1000, Errc::too_few_samples, "tail test needs at least 1000 increments");

    std::vector<std::pair<double, uint64_t>> atoms(norm_hist.begin(), norm_hist.end());
    if (atoms.size() < 3) {
        auto report = TestReport::make("increment_tail", "tail-decay",
                                       "P[|increment| > m] decays exponentially", -1.0, 0.0,
                                       TestReport::Direction::at_most, total);
        report.note = "degenerate tail: fewer than three distinct norms; trivially passing";
        return report;
    }

    // log tail P[X > m] at each distinct norm except the largest
    std::vector<double> xs, ys;
    uint64_t above = total;
    for (size_t i = 0; i + 1 < atoms.size(); ++i) {
        above -= atoms[i].second;
        if (above == 0) break;
        xs.push_back(atoms[i].first);
        ys.push_back(std::log(static_cast<double>(above) / static_cast<double>(total)));
    }
    require(xs.size() >= 3, Errc::too_few_samples, "too few tail points for a fit");

    const double m = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    double denom = m * sxx - sx * sx;
    require(denom > 1e-12, Errc::degenerate_fit, "degenerate tail fit");
    double slope = (m * sxy - sx * sy) / denom;
    double inter = (sy - slope * sx) / m;
    double sst = syy - sy * sy / m;
    double ssr = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (inter + slope * xs[i]);
        ssr += r * r;
    }
    double r2 = sst > 0 ? 1.0 - ssr / sst : 1.0;

    // statistic: negative iff (slope < 0 and R^2 > 0.9)
    double statistic = (slope < 0 && r2 > 0.9) ? -1.0 : 1.0;
    auto report = TestReport::make("increment_tail", "tail-decay",
                                   "P[|increment| > m] decays exponentially", statistic, 0.0,
                                   TestReport::Direction::at_most, total);
    report.details["slope"] = slope;
    report.details["r2"] = r2;
    report.details["points"] = m;
    return report;
}

TestReport increment_tail_test(const std::vector<double>& norms) {
    std::map<double, uint64_t> hist;
    for (double v : norms) ++hist[v];
    return increment_tail_test(hist);
}

TestReport independence_diagnostic(const std::vector<std::vector<VecD>>& sequences,
                                   uint64_t permutation_seed, int permutations) {
    size_t dim = 0;
    uint64_t pair_count = 0;
    double mean_len = 0.0;
    uint64_t seq_count = 0;
    for (const auto& seq : sequences) {
        if (seq.size() >= 2) {
            pair_count += seq.size() - 1;
            dim = seq.front().size();
        }
        mean_len += static_cast<double>(seq.size());
        ++seq_count;
    }
    require(pair_count >= 1000, Errc::too_few_samples,
            "independence diagnostic needs at least 1000 consecutive pairs");
    mean_len /= static_cast<double>(seq_count);

    auto pooled_corr = [&](const std::vector<std::vector<VecD>>& seqs, size_t c) {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        double n = 0;
        for (const auto& seq : seqs)
            for (size_t i = 0; i + 1 < seq.size(); ++i) {
                double x = seq[i][c], y = seq[i + 1][c];
                sx += x;
                sy += y;
                sxx += x * x;
                syy += y * y;
                sxy += x * y;
                n += 1;
            }
        double vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
        if (vx <= 0 || vy <= 0) return 0.0;
        return (sxy - sx * sy / n) / std::sqrt(vx * vy);
    };

    double worst = 0.0;
    for (size_t c = 0; c < dim; ++c) worst = std::max(worst, std::abs(pooled_corr(sequences, c)));

    // permutation null: shuffle increments within each sample
    Rng rng(permutation_seed);
    int exceed = 0;
    std::vector<std::vector<VecD>> shuffled = sequences;
    for (int b = 0; b < permutations; ++b) {
        for (auto& seq : shuffled)
            for (size_t i = seq.size(); i > 1; --i)
                std::swap(seq[i - 1], seq[rng.uniform_int(i)]);
        double stat = 0.0;
        for (size_t c = 0; c < dim; ++c)
            stat = std::max(stat, std::abs(pooled_corr(shuffled, c)));
        if (stat >= worst) ++exceed;
    }
    double p_perm = (1.0 + exceed) / (1.0 + permutations);

    const double threshold =
        5.0 / std::sqrt(static_cast<double>(pair_count)) + 2.0 / mean_len;
    auto report = TestReport::make("independence", "renewal-independence",
                                   "consecutive increments are uncorrelated", worst, threshold,
                                   TestReport::Direction::at_most, pair_count);
    report.details["permutation_p"] = p_perm;
    report.details["mean_sequence_length"] = mean_len;
    return report;
}

double MaxFluctuationSummary::quantile(double q) const {
    require(!sup_values.empty(), Errc::too_few_samples, "no paths recorded");
    double pos = q * static_cast<double>(sup_values.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, sup_values.size() - 1);
    double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sup_values[lo] + w * sup_values[hi];
}

double MaxFluctuationSummary::mean() const {
    double s = 0;
    for (double v : sup_values) s += v;
    return sup_values.empty() ? 0.0 : s / static_cast<double>(sup_values.size());
}

MaxFluctuationSummary max_fluctuation_stats(const std::vector<ScaledPath>& paths,
                                            double window_width) {
    MaxFluctuationSummary out;
    out.window_width = window_width;
    for (const auto& path : paths) {
        double sup = path.sup_norm();
        out.sup_values.push_back(sup);
        ++out.sup_hist[sup];
        int windows = static_cast<int>(std::round(1.0 / window_width));
        for (int w = 0; w < windows; ++w) {
            double lo = w * window_width, hi = (w + 1) * window_width;
            double wmax = norm2(path.evaluate(lo));
            // knots inside the window plus both endpoints
            for (size_t i = 0; i < path.times().size(); ++i)
                if (path.times()[i] >= lo && path.times()[i] <= hi)
                    wmax = std::max(wmax, norm2(path.values()[i]));
            wmax = std::max(wmax, norm2(path.evaluate(hi)));
            ++out.window_max_hist[wmax];
        }
    }
    std::sort(out.sup_values.begin(), out.sup_values.end());
    return out;
}

} // namespace percbridge
