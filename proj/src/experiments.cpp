#include "percbridge/experiments.hpp"

#include "percbridge/basis_frame.hpp"
#include "percbridge/local_clt.hpp"
#include "percbridge/xi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace percbridge {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kSeedScheme =
    "xoshiro256** streams; stream(i) seeded by splitmix64(master) xor mixed sample index";

std::vector<int64_t> parse_int_list(const std::string& text) {
    std::vector<int64_t> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoll(item));
    }
    return out;
}

std::string format_int_list(const std::vector<int64_t>& xs) {
    std::string s;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(xs[i]);
    }
    return s;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["kind"] = c.kind;
    j["out"] = c.out_dir;
    j["seed"] = c.seed;
    j["samples"] = c.samples;
    j["serial"] = c.serial;
    j["law"] = c.law;
    j["n"] = c.n;
    j["n-list"] = format_int_list(c.n_list);
    j["endpoint"] = format_int_list(c.endpoint);
    j["grid-points"] = c.grid_points;
    j["dim"] = c.dim;
    j["p"] = c.p;
    j["direction"] = format_int_list(c.direction);
    j["width"] = c.width;
    j["attempt-budget"] = c.attempt_budget;
    j["w-check"] = c.w_check;
    j["auto-reduce-n"] = c.auto_reduce_n;
    j["len"] = c.len;
    j["margin"] = c.margin;
    j["shard-index"] = c.shard_index;
    j["shard-count"] = c.shard_count;
    return j;
}

// identifies an experiment across shard runs
std::string experiment_id(const ExperimentConfig& c) {
    json j = config_to_json(c);
    j.erase("out");
    j.erase("shard-index");
    j.erase("shard-count");
    j.erase("serial");
    return j.dump();
}

void write_manifest(const fs::path& dir, const ExperimentConfig& c) {
    json j;
    j["config"] = config_to_json(c);
    j["seed"] = c.seed;
    j["versions"] = {{"percbridge", kVersion}};
    j["seed_scheme"] = kSeedScheme;
    j["experiment_id"] = experiment_id(c);
    io::write_json_file(dir / "manifest.json", j);
}

void write_reports(const fs::path& dir, const std::vector<TestReport>& reports) {
    fs::create_directories(dir / "reports");
    std::map<std::string, int> counts;
    for (const auto& r : reports) {
        std::string name = r.test + (counts[r.test]++ ? "_" + std::to_string(counts[r.test]) : "");
        io::write_json_file(dir / "reports" / (name + ".json"), io::report_to_json(r));
    }
}

// block-aligned contiguous sample range of one shard; block = ensemble shard
// size so that shard merges reproduce the single-run double-summation order
std::pair<uint64_t, uint64_t> shard_range(uint64_t samples, uint64_t index, uint64_t count,
                                          uint64_t block) {
    uint64_t blocks = (samples + block - 1) / block;
    uint64_t lo_block = blocks * index / count;
    uint64_t hi_block = blocks * (index + 1) / count;
    return {lo_block * block, std::min(samples, hi_block * block)};
}

Rational parse_p_exact(const std::string& text) {
    auto q = parse_rational(text);
    require(q.has_value() && *q > 0 && *q < 1, Errc::config_error,
            "p must be a rational or decimal in (0,1), got: " + text);
    return *q;
}

Point default_direction(int dim) {
    Point a(static_cast<size_t>(dim), 0);
    a[0] = 1;
    return a;
}

struct CsvWriter {
    std::ostringstream out;

    void header(const std::vector<std::string>& cols) {
        for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
        out << '\n';
    }
    void field(const std::string& v, bool first = false) { out << (first ? "" : ",") << v; }
    void end_row() { out << '\n'; }
};

// --- bridge ------------------------------------------------------------

RunResult run_bridge(const ExperimentConfig& c, const fs::path& dir, std::ostream& log) {
    StepLaw law = resolve_law(c.law);
    Point endpoint(static_cast<size_t>(law.dim()), 0);
    if (!c.endpoint.empty()) {
        require(static_cast<int>(c.endpoint.size()) == law.dim(), Errc::config_error,
                "endpoint dimension mismatch");
        endpoint = c.endpoint;
    }
    log << "bridge: law=" << c.law << " n=" << c.n << " samples=" << c.samples << "\n";

    BridgeTables<double> tables(law, c.n, endpoint);

    // exact C_n when the law carries rationals
    CnEstimate cn;
    if (law.exact()) {
        BridgeTables<Rational> exact(law, c.n, endpoint);
        cn = estimate_cn(exact, 0);
    } else {
        cn = CnEstimate{};
    }

    EnsembleOptions opts;
    auto [lo, hi] = shard_range(c.samples, c.shard_index, c.shard_count, opts.shard_size);
    opts.samples = hi;
    opts.sample_begin = lo;
    opts.seed = c.seed;
    opts.grid = SummaryStats::default_grid(c.grid_points);
    opts.mode = c.serial ? ExecMode::serial : ExecMode::parallel;
    SummaryStats stats = run_bridge_ensemble(tables, opts);

    // artifacts
    {
        std::ostringstream csv;
        csv << "sample";
        for (double t : stats.grid()) csv << ",t" << io::format_double(t);
        csv << '\n';
        const auto& raw = stats.raw();
        for (size_t i = 0; i < raw.size(); ++i) {
            csv << lo + i;
            for (size_t t = 0; t < stats.grid().size(); ++t)
                csv << ',' << io::format_double(raw[i][t * static_cast<size_t>(law.dim())]);
            csv << '\n';
        }
        io::write_text_file(dir / "samples.csv", csv.str());
    }
    {
        Rng rng = Rng::stream(c.seed, lo);
        std::ostringstream csv;
        io::write_scaled_path_csv(csv, interpolate_scale(tables.sample(rng), c.n));
        io::write_text_file(dir / "path0.csv", csv.str());
    }
    if (c.n <= 64) {
        std::ostringstream csv;
        io::write_marginals_csv(csv, tables);
        io::write_text_file(dir / "marginals.csv", csv.str());
    }
    io::write_json_file(dir / "stats.json", io::stats_to_json(stats));
    {
        json j;
        j["n"] = cn.n;
        j["value"] = cn.value;
        if (cn.exact) j["exact"] = to_string(*cn.exact);
        j["limit_sigma2"] = cn.limit;
        io::write_json_file(dir / "cn.json", j);
    }

    std::vector<TestReport> reports;
    if (stats.count() >= 100) {
        reports.push_back(bridge_covariance_test(stats, c.n, 0));
        double c_scale = law.exact() ? cn.value
                                     : bridge_covariance_test(stats, c.n, 0).details.at("c_fit");
        reports.push_back(marginal_gaussian_test(stats, 0.5, c_scale, 0));
    }
    write_reports(dir, reports);

    RunResult out;
    out.reports = reports;
    for (const auto& r : reports)
        if (!r.pass) out.exit_code = kExitTestFailure;
    return out;
}

// --- clt ----------------------------------------------------------------

RunResult run_clt(const ExperimentConfig& c, const fs::path& dir, std::ostream& log) {
    StepLaw law = resolve_law(c.law);
    require(law.dim() == 1, Errc::config_error, "clt needs a one-dimensional law");
    std::vector<int64_t> ns = c.n_list.empty() ? std::vector<int64_t>{16, 64, 256} : c.n_list;

    if (std::abs(law.mean()[0]) > 1e-12) {
        log << "clt: tilting law to zero mean first\n";
        law = solve_tilt(law, VecD{0.0}).second;
    }

    CsvWriter csv;
    csv.header({"n", "distance"});
    std::vector<double> dist;
    for (int64_t n : ns) {
        dist.push_back(local_clt_distance(law, n));
        csv.field(std::to_string(n), true);
        csv.field(io::format_double(dist.back()));
        csv.end_row();
        log << "clt: n=" << n << " distance=" << dist.back() << "\n";
    }
    io::write_text_file(dir / "clt.csv", csv.out.str());

    // statistic: worst consecutive ratio; < 1 iff strictly decreasing
    double worst_ratio = 0.0;
    for (size_t i = 0; i + 1 < dist.size(); ++i)
        worst_ratio = std::max(worst_ratio, dist[i + 1] / dist[i]);
    auto report = TestReport::make("local_clt_decreasing", "local-clt",
                                   "sup |sqrt(n)/h p_n - phi| decreases along n",
                                   worst_ratio, 1.0, TestReport::Direction::at_most,
                                   static_cast<uint64_t>(ns.size()));
    report.details["final_distance"] = dist.back();
    write_reports(dir, {report});

    RunResult out;
    out.reports = {report};
    if (!report.pass) out.exit_code = kExitTestFailure;
    return out;
}

// --- xi -----------------------------------------------------------------

RunResult run_xi(const ExperimentConfig& c, const fs::path& dir, std::ostream& log) {
    const double p = to_double(parse_p_exact(c.p));
    Point a = c.direction.empty() ? default_direction(c.dim) : Point(c.direction);
    std::vector<int64_t> ns = c.n_list.empty() ? std::vector<int64_t>{2, 3, 4, 5} : c.n_list;
    XiEstimate est = estimate_xi(c.dim, p, a, ns, c.samples, c.seed, c.margin, !c.serial);
    log << "xi: p=" << p << " xi_hat=" << est.xi << " se=" << est.se << "\n";

    CsvWriter csv;
    csv.header({"n", "hits", "p_hat"});
    for (size_t i = 0; i < est.ns.size(); ++i) {
        csv.field(std::to_string(est.ns[i]), true);
        csv.field(std::to_string(est.hits[i]));
        csv.field(io::format_double(est.p_hat[i]));
        csv.end_row();
    }
    io::write_text_file(dir / "xi.csv", csv.out.str());

    json j;
    j["xi"] = est.xi;
    j["se"] = est.se;
    j["intercept"] = est.intercept;
    j["samples_per_n"] = est.samples_per_n;
    io::write_json_file(dir / "xi.json", j);

    // single-open-path lower bound on connectivity: xi <= ln(1/p)
    auto report = TestReport::make("xi_upper_bound", "xi-coherence",
                                   "xi_hat <= ln(1/p) + 2 SE", est.xi,
                                   std::log(1.0 / p) + 2.0 * est.se,
                                   TestReport::Direction::at_most, c.samples);
    report.details["xi"] = est.xi;
    report.details["se"] = est.se;
    write_reports(dir, {report});

    RunResult out;
    out.reports = {report};
    if (!report.pass) out.exit_code = kExitTestFailure;
    return out;
}

// --- renewal oracle ------------------------------------------------------

RunResult run_renewal_oracle(const ExperimentConfig& c, const fs::path& dir,
                             std::ostream& log) {
    Rational p = parse_p_exact(c.p);
    Point a = c.direction.empty() ? default_direction(c.dim) : Point(c.direction);
    Point origin(static_cast<size_t>(c.dim), 0);
    SlabSpec spec = SlabSpec::make_exact(c.dim, p, a, origin, scale(a, c.len), c.width);
    SlabGeometry geom(spec);
    log << "renewal-oracle: d=" << c.dim << " W=" << c.width << " len=" << c.len
        << " p=" << to_string(p) << " edges=" << geom.edge_count() << "\n";

    auto table = enumerate_connectivity(geom);
    {
        std::ostringstream csv;
        io::write_connectivity_csv(csv, table);
        io::write_text_file(dir / "connectivity.csv", csv.str());
    }

    auto dist = enumerate_regeneration_patterns(geom);
    bool all_equal = true;
    CsvWriter csv;
    csv.header({"pattern", "lhs", "rhs", "equal"});
    for (const auto& pat : dist.patterns) {
        Rational rhs = factorization_rhs(geom, pat.junctions);
        bool eq = pat.prob == rhs;
        all_equal = all_equal && eq;
        std::string name;
        for (const auto& pt : pat.junctions) {
            if (!name.empty()) name += ';';
            name += format_point(pt);
        }
        csv.field(name, true);
        csv.field(to_string(pat.prob));
        csv.field(to_string(rhs));
        csv.field(eq ? "1" : "0");
        csv.end_row();
    }
    io::write_text_file(dir / "factorization.csv", csv.out.str());

    auto relation = verify_renewal_relation(geom);
    CsvWriter rel;
    rel.header({"x", "lhs", "rhs", "equal", "paper_gap"});
    for (const auto& row : relation.rows) {
        rel.field(format_point(row.x), true);
        rel.field(to_string(row.lhs));
        rel.field(to_string(row.rhs));
        rel.field(row.lhs == row.rhs ? "1" : "0");
        rel.field(io::format_double(std::abs(to_double(row.lhs) - row.paper_rhs)));
        rel.end_row();
    }
    io::write_text_file(dir / "relation.csv", rel.out.str());

    auto report = TestReport::make(
        "renewal_factorization", "renewal-factorization",
        "P[h; exact pattern] = product of f over pieces / junction normalizers",
        (all_equal && relation.exact) ? -1.0 : 1.0, 0.0, TestReport::Direction::at_most,
        static_cast<uint64_t>(dist.patterns.size()));
    report.details["patterns"] = static_cast<double>(dist.patterns.size());
    report.details["relation_rows"] = static_cast<double>(relation.rows.size());
    report.details["max_paper_discrepancy"] = relation.max_paper_discrepancy;
    write_reports(dir, {report});

    RunResult out;
    out.reports = {report};
    if (!report.pass) out.exit_code = kExitTestFailure;
    return out;
}

// --- perc ----------------------------------------------------------------

struct PercOutcome {
    ClusterEnsembleResult result;
    int64_t n_used;
    double median_deviation = 0.0;
    double gap_exceed_frac = 0.0;
};

PercOutcome run_perc_ensemble(const ExperimentConfig& c, int64_t n, std::ostream& log) {
    const double p = to_double(parse_p_exact(c.p));
    Point a = c.direction.empty() ? default_direction(c.dim) : Point(c.direction);
    Point origin(static_cast<size_t>(c.dim), 0);

    int64_t n_used = n;
    if (c.auto_reduce_n) {
        SlabSpec spec = SlabSpec::make(c.dim, p, a, origin, scale(a, n), c.width);
        SlabGeometry geom(spec);
        ConditionedClusterSampler pilot(geom);
        Rng rng = Rng::stream(c.seed ^ 0x9E3779B97F4A7C15ULL, 0);
        uint64_t attempts = 0, accepted = 0;
        const uint64_t pilot_budget = 2000000;
        while (attempts < pilot_budget && accepted < 20) {
            try {
                auto s = pilot.sample(rng, pilot_budget - attempts);
                attempts += s.attempts;
                ++accepted;
            } catch (const Error&) {
                attempts = pilot_budget;
            }
        }
        double rate = attempts ? static_cast<double>(accepted) / static_cast<double>(attempts)
                               : 0.0;
        if (rate < 1e-5) {
            log << "perc: pilot acceptance " << rate << " < 1e-5, reducing n to 8\n";
            n_used = 8;
        }
    }

    SlabSpec spec = SlabSpec::make(c.dim, p, a, origin, scale(a, n_used), c.width);
    SlabGeometry geom(spec);

    ClusterEnsembleOptions opts;
    opts.samples = c.samples;
    opts.seed = c.seed;
    opts.attempts_per_sample = std::max<uint64_t>(1, c.attempt_budget / std::max<uint64_t>(1, c.samples));
    opts.grid = SummaryStats::default_grid(c.grid_points);
    opts.keep_skeletons = true;
    opts.mode = c.serial ? ExecMode::serial : ExecMode::parallel;

    PercOutcome out{run_cluster_ensemble(geom, n_used, a, opts), n_used};

    std::vector<double> devs;
    uint64_t exceed = 0;
    const double cube_root = std::cbrt(static_cast<double>(n_used));
    for (const auto& rec : out.result.records) {
        devs.push_back(rec.deviation);
        if (rec.max_gap > cube_root) ++exceed;
    }
    std::sort(devs.begin(), devs.end());
    out.median_deviation = devs.empty() ? 0.0 : devs[devs.size() / 2];
    out.gap_exceed_frac =
        devs.empty() ? 0.0 : static_cast<double>(exceed) / static_cast<double>(devs.size());
    log << "perc: n=" << n_used << " accepted=" << out.result.records.size()
        << " acceptance=" << out.result.acceptance_rate
        << " median_dev=" << out.median_deviation << "\n";
    return out;
}

RunResult run_perc(const ExperimentConfig& c, const fs::path& dir, std::ostream& log) {
    PercOutcome outcome = run_perc_ensemble(c, c.n, log);
    const ClusterEnsembleResult& res = outcome.result;

    {
        CsvWriter csv;
        csv.header({"sample", "attempts", "regeneration_points", "deviation", "max_gap"});
        for (size_t i = 0; i < res.records.size(); ++i) {
            const auto& r = res.records[i];
            csv.field(std::to_string(i), true);
            csv.field(std::to_string(r.attempts));
            csv.field(std::to_string(r.regeneration_count));
            csv.field(io::format_double(r.deviation));
            csv.field(io::format_double(r.max_gap));
            csv.end_row();
        }
        io::write_text_file(dir / "records.csv", csv.out.str());
    }
    {
        std::ostringstream csv;
        csv << "sample,i";
        for (int cdx = 1; cdx <= c.dim; ++cdx) csv << ",x" << cdx;
        csv << '\n';
        for (size_t s = 0; s < res.skeletons.size(); ++s)
            for (size_t i = 0; i < res.skeletons[s].size(); ++i)
                csv << s << ',' << i << ',' << format_point(res.skeletons[s][i], ',') << '\n';
        io::write_text_file(dir / "skeletons.csv", csv.str());
    }
    io::write_json_file(dir / "stats.json", io::stats_to_json(res.gamma_stats));
    {
        json j;
        j["n_used"] = outcome.n_used;
        j["acceptance_rate"] = res.acceptance_rate;
        j["total_attempts"] = res.total_attempts;
        j["median_deviation"] = outcome.median_deviation;
        j["gap_exceed_fraction"] = outcome.gap_exceed_frac;
        j["gamma_endpoint_violations"] = res.gamma_endpoint_violations;
        io::write_json_file(dir / "run.json", j);
    }

    std::vector<TestReport> reports;
    auto endpoint_report = TestReport::make(
        "gamma_endpoints_zero", "skeleton-bridge-shape", "gamma(0) = gamma(1) = 0 exactly",
        static_cast<double>(res.gamma_endpoint_violations), 0.0, TestReport::Direction::at_most,
        res.records.size());
    reports.push_back(endpoint_report);
    if (res.records.size() >= 100) {
        reports.push_back(bridge_covariance_test(res.gamma_stats, outcome.n_used, 0, 6.0));
        reports.back().claim = "skeleton-bridge-shape";
    }
    if (res.gamma_stats.increment_count() >= 1000)
        reports.push_back(increment_tail_test(res.gamma_stats.increment_hist()));
    {
        uint64_t pairs = 0;
        for (const auto& seq : res.increment_sequences)
            if (seq.size() >= 2) pairs += seq.size() - 1;
        if (pairs >= 1000) reports.push_back(independence_diagnostic(res.increment_sequences));
    }

    if (c.w_check) {
        ExperimentConfig doubled(c);
        doubled.width = 2 * c.width;
        doubled.w_check = false;
        doubled.auto_reduce_n = false;
        std::ostringstream sink;
        ExperimentConfig fixed_n(doubled);
        fixed_n.n = outcome.n_used;
        PercOutcome wide = run_perc_ensemble(fixed_n, outcome.n_used, sink);
        json j;
        j["width"] = c.width;
        j["width_doubled"] = doubled.width;
        j["median_deviation_shift"] =
            wide.median_deviation - outcome.median_deviation;
        j["acceptance_rate_shift"] =
            wide.result.acceptance_rate - res.acceptance_rate;
        j["gap_exceed_shift"] = wide.gap_exceed_frac - outcome.gap_exceed_frac;
        io::write_json_file(dir / "w_check.json", j);
        log << "perc: W-doubling shifts written to w_check.json\n";
    }

    write_reports(dir, reports);
    RunResult out;
    out.reports = reports;
    for (const auto& r : reports)
        if (!r.pass) out.exit_code = kExitTestFailure;
    return out;
}

} // namespace

StepLaw resolve_law(const std::string& name) {
    auto atoms = [](std::vector<std::pair<Point, Rational>> a) {
        return StepLaw::from_rational_atoms(std::move(a));
    };
    if (name == "pm1") return atoms({{{1}, rational(1, 2)}, {{-1}, rational(1, 2)}});
    if (name == "lazy")
        return atoms({{{0}, rational(1, 2)}, {{1}, rational(1, 4)}, {{-1}, rational(1, 4)}});
    if (name == "pm2") return atoms({{{2}, rational(1, 2)}, {{-2}, rational(1, 2)}});
    if (name == "asym") return atoms({{{1}, rational(2, 3)}, {{-1}, rational(1, 3)}});
    if (name == "asym-tilted") return atoms({{{2}, rational(1, 3)}, {{-1}, rational(2, 3)}});
    if (name == "two-speed") return atoms({{{1}, rational(1, 2)}, {{2}, rational(1, 2)}});
    if (name == "diag")
        return atoms({{{1, 1}, rational(1, 2)}, {{1, -1}, rational(1, 2)}});
    if (name == "drift")
        return atoms({{{2, 0}, rational(1, 2)},
                      {{1, 1}, rational(1, 4)},
                      {{1, -1}, rational(1, 4)}});
    std::ifstream in(name);
    require(in.good(), Errc::config_error, "unknown law name or unreadable file: " + name);
    return StepLaw::parse(in);
}

void apply_config_entry(ExperimentConfig& c, const std::string& key, const std::string& value) {
    try {
        if (key == "kind") c.kind = value;
        else if (key == "out") c.out_dir = value;
        else if (key == "seed") c.seed = std::stoull(value);
        else if (key == "samples") c.samples = std::stoull(value);
        else if (key == "serial") c.serial = (value == "1" || value == "true");
        else if (key == "law") c.law = value;
        else if (key == "n") c.n = std::stoll(value);
        else if (key == "n-list") c.n_list = parse_int_list(value);
        else if (key == "endpoint") c.endpoint = parse_int_list(value);
        else if (key == "grid-points") c.grid_points = std::stoi(value);
        else if (key == "dim") c.dim = std::stoi(value);
        else if (key == "p") c.p = value;
        else if (key == "direction") c.direction = parse_int_list(value);
        else if (key == "width") c.width = std::stoll(value);
        else if (key == "attempt-budget") c.attempt_budget = std::stoull(value);
        else if (key == "w-check") c.w_check = (value == "1" || value == "true");
        else if (key == "auto-reduce-n") c.auto_reduce_n = (value == "1" || value == "true");
        else if (key == "len") c.len = std::stoll(value);
        else if (key == "margin") c.margin = std::stoll(value);
        else if (key == "shard-index") c.shard_index = std::stoull(value);
        else if (key == "shard-count") c.shard_count = std::stoull(value);
        else fail(Errc::config_error, "unknown config key: " + key);
    } catch (const std::logic_error&) {
        fail(Errc::config_error, "bad value for " + key + ": " + value);
    }
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), Errc::config_error, "cannot open config file " + path);
    ExperimentConfig c;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            size_t b = s.find_first_not_of(" \t\r");
            size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        require(eq != std::string::npos, Errc::config_error, "expected key=value: " + line);
        apply_config_entry(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
}

RunResult run_experiment(const ExperimentConfig& config, std::ostream& log) {
    fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec, Errc::io_error, "cannot create output directory " + dir.string());
    write_manifest(dir, config);

    if (config.kind == "bridge") return run_bridge(config, dir, log);
    if (config.kind == "clt") return run_clt(config, dir, log);
    if (config.kind == "xi") return run_xi(config, dir, log);
    if (config.kind == "renewal-oracle") return run_renewal_oracle(config, dir, log);
    if (config.kind == "perc") return run_perc(config, dir, log);
    fail(Errc::config_error, "unknown experiment kind: " + config.kind);
}

int run_report(const std::string& dir_name, std::ostream& log) {
    fs::path dir(dir_name);
    require(fs::exists(dir), Errc::io_error, "no such directory: " + dir_name);

    struct RunInfo {
        fs::path dir;
        json manifest;
    };
    std::vector<RunInfo> runs;
    if (fs::exists(dir / "manifest.json")) {
        runs.push_back({dir, io::read_json_file(dir / "manifest.json")});
    } else {
        std::vector<fs::path> subdirs;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_directory()) subdirs.push_back(entry.path());
        std::sort(subdirs.begin(), subdirs.end());
        for (const auto& sub : subdirs) {
            if (!fs::exists(sub / "manifest.json"))
                fail(Errc::missing_manifest, sub.string() + " has no manifest.json");
            runs.push_back({sub, io::read_json_file(sub / "manifest.json")});
        }
    }

    std::map<std::string, std::pair<int, int>> matrix; // claim -> (pass, fail)
    std::vector<std::string> failures;
    for (const auto& run : runs) {
        fs::path reports = run.dir / "reports";
        if (!fs::exists(reports)) continue;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(reports))
            if (entry.path().extension() == ".json") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            TestReport r = io::report_from_json(io::read_json_file(file));
            auto& cell = matrix[r.claim];
            if (r.pass) ++cell.first;
            else {
                ++cell.second;
                failures.push_back(r.claim + " (" + r.test + " in " + run.dir.string() + ")");
            }
        }
    }

    // shard groups: merge stats and recheck the covariance shape
    std::map<std::string, std::vector<const RunInfo*>> groups;
    for (const auto& run : runs)
        if (run.manifest.contains("experiment_id") && fs::exists(run.dir / "stats.json"))
            groups[run.manifest.at("experiment_id").get<std::string>()].push_back(&run);
    for (const auto& [id, members] : groups) {
        if (members.size() < 2) continue;
        std::vector<const RunInfo*> ordered(members);
        std::sort(ordered.begin(), ordered.end(), [](const RunInfo* a, const RunInfo* b) {
            return a->manifest.at("config").at("shard-index").get<uint64_t>() <
                   b->manifest.at("config").at("shard-index").get<uint64_t>();
        });
        SummaryStats merged = io::stats_from_json(io::read_json_file(ordered[0]->dir / "stats.json"));
        for (size_t i = 1; i < ordered.size(); ++i)
            merged.merge(io::stats_from_json(io::read_json_file(ordered[i]->dir / "stats.json")));
        int64_t n = ordered[0]->manifest.at("config").at("n").get<int64_t>();
        if (merged.count() >= 100) {
            TestReport r = bridge_covariance_test(merged, n, 0);
            auto& cell = matrix[r.claim + " (merged shards)"];
            if (r.pass) ++cell.first;
            else ++cell.second;
        }
    }

    log << "claim matrix (" << runs.size() << " runs):\n";
    bool any_fail = false;
    for (const auto& [claim, cell] : matrix) {
        log << "  " << claim << ": " << cell.first << " pass, " << cell.second << " fail\n";
        if (cell.second > 0) any_fail = true;
    }
    for (const auto& f : failures) log << "  FAIL " << f << "\n";
    if (matrix.empty()) log << "  (no reports found)\n";
    log << "overall: " << (any_fail ? "FAIL" : "PASS") << "\n";
    return any_fail ? kExitTestFailure : kExitOk;
}

} // namespace percbridge
