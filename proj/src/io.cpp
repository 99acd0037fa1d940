#include "percbridge/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace percbridge {

// serialization needs the internals; kept out of the public surface
struct SummaryStatsAccess {
    static io::json to_json(const SummaryStats& s);
    static SummaryStats from_json(const io::json& j);
};

namespace io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), Errc::io_error, "cannot open " + path.string() + " for writing");
    out << content;
    require(out.good(), Errc::io_error, "write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Errc::io_error, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

json read_json_file(const std::filesystem::path& path) {
    return json::parse(read_text_file(path));
}

void write_scaled_path_csv(std::ostream& out, const ScaledPath& path) {
    out << "index,t";
    for (int c = 1; c <= path.value_dim(); ++c) out << ",y" << c;
    out << '\n';
    for (size_t i = 0; i < path.knot_count(); ++i) {
        out << i << ',' << format_double(path.times()[i]);
        for (double v : path.values()[i]) out << ',' << format_double(v);
        out << '\n';
    }
}

void write_skeleton_csv(std::ostream& out, const RegenerationSkeleton& skeleton) {
    if (skeleton.points.empty()) {
        out << "i\n";
        return;
    }
    out << "i";
    for (size_t c = 1; c <= skeleton.points.front().size(); ++c) out << ",x" << c;
    out << '\n';
    for (size_t i = 0; i < skeleton.points.size(); ++i) {
        out << i;
        for (auto v : skeleton.points[i]) out << ',' << v;
        out << '\n';
    }
}

void write_connectivity_csv(std::ostream& out, const std::vector<ConnectivityRow>& rows) {
    out << "x,h,f\n";
    for (const auto& row : rows)
        out << format_point(row.x) << ',' << to_string(row.h) << ',' << to_string(row.f)
            << '\n';
}

json report_to_json(const TestReport& report) {
    json j;
    j["test"] = report.test;
    j["claim"] = report.claim;
    j["null"] = report.null_desc;
    j["statistic"] = report.statistic;
    j["threshold"] = report.threshold;
    j["direction"] = report.direction == TestReport::Direction::at_most ? "at_most" : "at_least";
    j["pass"] = report.pass;
    j["n_samples"] = report.n_samples;
    j["details"] = report.details;
    if (!report.note.empty()) j["note"] = report.note;
    return j;
}

TestReport report_from_json(const json& j) {
    TestReport r;
    r.test = j.at("test").get<std::string>();
    r.claim = j.at("claim").get<std::string>();
    r.null_desc = j.at("null").get<std::string>();
    r.statistic = j.at("statistic").get<double>();
    r.threshold = j.at("threshold").get<double>();
    r.direction = j.at("direction").get<std::string>() == "at_most"
                      ? TestReport::Direction::at_most
                      : TestReport::Direction::at_least;
    r.pass = j.at("pass").get<bool>();
    r.n_samples = j.at("n_samples").get<uint64_t>();
    if (j.contains("details"))
        r.details = j.at("details").get<std::map<std::string, double>>();
    if (j.contains("note")) r.note = j.at("note").get<std::string>();
    return r;
}

namespace {

json hist_to_json(const std::map<double, uint64_t>& hist) {
    json arr = json::array();
    for (const auto& [v, c] : hist) arr.push_back(json::array({v, c}));
    return arr;
}

std::map<double, uint64_t> hist_from_json(const json& arr) {
    std::map<double, uint64_t> hist;
    for (const auto& entry : arr)
        hist[entry.at(0).get<double>()] = entry.at(1).get<uint64_t>();
    return hist;
}

} // namespace

json stats_to_json(const SummaryStats& stats) { return SummaryStatsAccess::to_json(stats); }

SummaryStats stats_from_json(const json& j) { return SummaryStatsAccess::from_json(j); }

} // namespace io

io::json SummaryStatsAccess::to_json(const SummaryStats& s) {
    io::json j;
    j["grid"] = s.grid_;
    j["value_dim"] = s.value_dim_;
    j["count"] = s.count_;
    j["increment_count"] = s.increment_count_;
    j["exhaustive"] = s.exhaustive;
    j["sum"] = s.sum_;
    j["sum2"] = s.sum2_;
    j["cross"] = s.cross_;
    j["cross_x2y"] = s.cross_x2y_;
    j["cross_xy2"] = s.cross_xy2_;
    j["cross_x2y2"] = s.cross_x2y2_;
    io::json hists = io::json::array();
    for (const auto& h : s.marginal_hist_) hists.push_back(io::hist_to_json(h));
    j["marginal_hist"] = std::move(hists);
    j["sup_hist"] = io::hist_to_json(s.sup_hist_);
    j["increment_hist"] = io::hist_to_json(s.increment_hist_);
    return j;
}

SummaryStats SummaryStatsAccess::from_json(const io::json& j) {
    SummaryStats s(j.at("grid").get<VecD>(), j.at("value_dim").get<int>(), false);
    s.count_ = j.at("count").get<uint64_t>();
    s.increment_count_ = j.at("increment_count").get<uint64_t>();
    s.exhaustive = j.at("exhaustive").get<bool>();
    s.sum_ = j.at("sum").get<VecD>();
    s.sum2_ = j.at("sum2").get<VecD>();
    s.cross_ = j.at("cross").get<VecD>();
    s.cross_x2y_ = j.at("cross_x2y").get<VecD>();
    s.cross_xy2_ = j.at("cross_xy2").get<VecD>();
    s.cross_x2y2_ = j.at("cross_x2y2").get<VecD>();
    const auto& hists = j.at("marginal_hist");
    require(hists.size() == s.marginal_hist_.size(), Errc::io_error,
            "corrupt stats file: histogram count mismatch");
    for (size_t i = 0; i < s.marginal_hist_.size(); ++i)
        s.marginal_hist_[i] = io::hist_from_json(hists[i]);
    s.sup_hist_ = io::hist_from_json(j.at("sup_hist"));
    s.increment_hist_ = io::hist_from_json(j.at("increment_hist"));
    return s;
}

} // namespace percbridge
