#ifndef PERCBRIDGE_IO_HPP
#define PERCBRIDGE_IO_HPP

#include "percbridge/bridge_tables.hpp"
#include "percbridge/perc_enumerate.hpp"
#include "percbridge/percolation.hpp"
#include "percbridge/scaled_path.hpp"
#include "percbridge/stat_tests.hpp"
#include "percbridge/summary_stats.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace percbridge::io {

using nlohmann::json;

// fixed 17-significant-digit rendering; reruns with the same seed are
// byte-identical
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
json read_json_file(const std::filesystem::path& path);

// CSV: comma-separated, '.' decimal point, header row
void write_scaled_path_csv(std::ostream& out, const ScaledPath& path);   // index,t,y1,...
void write_skeleton_csv(std::ostream& out, const RegenerationSkeleton& skeleton); // i,coords...
void write_connectivity_csv(std::ostream& out, const std::vector<ConnectivityRow>& rows); // x,h,f

template <class S>
void write_marginals_csv(std::ostream& out, const BridgeTables<S>& tables) {
    out << "i";
    for (int c = 0; c < tables.law().dim(); ++c) out << ",x" << c + 1;
    out << ",prob\n";
    for (int64_t i = 0; i <= tables.steps(); ++i) {
        for (const auto& [x, p] : tables.marginal(i)) {
            out << i;
            for (auto v : x) out << ',' << v;
            if constexpr (std::is_same_v<S, Rational>) {
                out << ',' << to_string(p) << '\n';
            } else {
                out << ',' << format_double(p) << '\n';
            }
        }
    }
}

json report_to_json(const TestReport& report);
TestReport report_from_json(const json& j);

json stats_to_json(const SummaryStats& stats); // moments and histograms; raw is dropped
SummaryStats stats_from_json(const json& j);

} // namespace percbridge::io

#endif
