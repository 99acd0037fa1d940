#ifndef PERCBRIDGE_EXPERIMENTS_HPP
#define PERCBRIDGE_EXPERIMENTS_HPP

#include "percbridge/ensemble.hpp"
#include "percbridge/io.hpp"
#include "percbridge/stat_tests.hpp"
#include "percbridge/step_law.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace percbridge {

// exit codes shared by the CLI and the experiment layer
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitBudgetExhausted = 3;
inline constexpr int kExitTestFailure = 4;

struct ExperimentConfig {
    std::string kind; // bridge | perc | clt | xi | renewal-oracle
    std::string out_dir = "out";
    uint64_t seed = 1;
    uint64_t samples = 10000;
    bool serial = false;

    std::string law = "pm1"; // builtin name or a step-law file path
    int64_t n = 100;
    std::vector<int64_t> n_list;   // clt distances / xi fit range
    std::vector<int64_t> endpoint; // bridge pinning point; empty = origin
    int grid_points = 16;

    int dim = 2;
    std::string p = "0.45"; // parsed exactly when rational
    std::vector<int64_t> direction;
    int64_t width = 8;
    uint64_t attempt_budget = 100000000;
    bool w_check = false;      // rerun at 2W and report estimate shifts
    bool auto_reduce_n = false; // drop n to 8 when acceptance < 1e-5
    int64_t len = 3;           // renewal-oracle slab length
    int64_t margin = 8;        // xi box margin

    uint64_t shard_index = 0; // contiguous block sharding; 0/1 = whole run
    uint64_t shard_count = 1;
};

// key=value lines; '#' comments; unknown keys rejected (ConfigError)
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

struct RunResult {
    int exit_code = kExitOk;
    std::vector<TestReport> reports;
};

// Runs one experiment, writing CSV samples, JSON reports and a manifest under
// config.out_dir. Identical config+seed produces byte-identical files.
RunResult run_experiment(const ExperimentConfig& config, std::ostream& log);

// Aggregates run manifests under `dir` into a pass/fail matrix keyed by paper
// claim; shard groups are merged through SummaryStats first.
int run_report(const std::string& dir, std::ostream& log);

// builtin named laws; falls back to parsing `name` as a step-law file
StepLaw resolve_law(const std::string& name);

} // namespace percbridge

#endif
