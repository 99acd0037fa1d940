#include "percbridge/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using percbridge::ExperimentConfig;

void add_common(CLI::App* cmd, ExperimentConfig& config, std::string& config_file) {
    cmd->add_option("--config", config_file, "key=value config file; flags win");
    cmd->add_option("--seed", config.seed, "master seed");
    cmd->add_option("--samples", config.samples, "sample count");
    cmd->add_option("--out", config.out_dir, "output directory");
    cmd->add_flag("--serial", config.serial, "run the serial reference kernels");
    cmd->add_option("--shard-index", config.shard_index, "contiguous shard index");
    cmd->add_option("--shard-count", config.shard_count, "total shards");
    cmd->add_option("--grid-points", config.grid_points, "time grid resolution");
}

int dispatch(ExperimentConfig config, const std::string& config_file, CLI::App* cmd) {
    if (!config_file.empty()) {
        ExperimentConfig from_file = percbridge::parse_config_file(config_file);
        from_file.kind = config.kind;
        // command-line flags win over file entries
        for (const auto* opt : cmd->get_options()) {
            if (opt->count() == 0) continue;
            std::string name = opt->get_name();
            if (name.rfind("--", 0) == 0) name = name.substr(2);
            if (name == "config") continue;
            // re-apply the parsed value by round-tripping through the entry setter
            if (name == "seed") from_file.seed = config.seed;
            else if (name == "samples") from_file.samples = config.samples;
            else if (name == "out") from_file.out_dir = config.out_dir;
            else if (name == "serial") from_file.serial = config.serial;
            else if (name == "shard-index") from_file.shard_index = config.shard_index;
            else if (name == "shard-count") from_file.shard_count = config.shard_count;
            else if (name == "grid-points") from_file.grid_points = config.grid_points;
            else if (name == "law") from_file.law = config.law;
            else if (name == "n") from_file.n = config.n;
            else if (name == "n-list") from_file.n_list = config.n_list;
            else if (name == "endpoint") from_file.endpoint = config.endpoint;
            else if (name == "dim") from_file.dim = config.dim;
            else if (name == "p") from_file.p = config.p;
            else if (name == "direction") from_file.direction = config.direction;
            else if (name == "width") from_file.width = config.width;
            else if (name == "attempt-budget") from_file.attempt_budget = config.attempt_budget;
            else if (name == "w-check") from_file.w_check = config.w_check;
            else if (name == "auto-reduce-n") from_file.auto_reduce_n = config.auto_reduce_n;
            else if (name == "len") from_file.len = config.len;
            else if (name == "margin") from_file.margin = config.margin;
        }
        config = from_file;
    }
    return percbridge::run_experiment(config, std::cout).exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conditioned lattice bridges and subcritical percolation clusters"};
    app.require_subcommand(1);

    ExperimentConfig config;
    std::string config_file;
    std::string report_dir;

    auto* bridge = app.add_subcommand("bridge", "exact-sampler bridge ensemble");
    add_common(bridge, config, config_file);
    bridge->add_option("--law", config.law, "builtin law name or step-law file");
    bridge->add_option("--n", config.n, "walk length");
    bridge->add_option("--endpoint", config.endpoint, "pinned endpoint (default origin)");

    auto* perc = app.add_subcommand("perc", "conditioned percolation clusters");
    add_common(perc, config, config_file);
    perc->add_option("--dim", config.dim, "lattice dimension");
    perc->add_option("--p", config.p, "edge probability");
    perc->add_option("--n", config.n, "endpoint multiple of the direction");
    perc->add_option("--direction", config.direction, "conditioning direction a");
    perc->add_option("--width", config.width, "transverse truncation W");
    perc->add_option("--attempt-budget", config.attempt_budget, "total rejection budget");
    perc->add_flag("--w-check", config.w_check, "redo at 2W and report estimate shifts");
    perc->add_flag("--auto-reduce-n", config.auto_reduce_n,
                   "reduce n to 8 when acceptance < 1e-5");

    auto* clt = app.add_subcommand("clt", "local CLT distances");
    add_common(clt, config, config_file);
    clt->add_option("--law", config.law, "builtin law name or step-law file");
    clt->add_option("--n-list", config.n_list, "walk lengths");

    auto* xi = app.add_subcommand("xi", "inverse correlation length estimate");
    add_common(xi, config, config_file);
    xi->add_option("--dim", config.dim, "lattice dimension");
    xi->add_option("--p", config.p, "edge probability");
    xi->add_option("--direction", config.direction, "direction x");
    xi->add_option("--n-list", config.n_list, "fit range of n");
    xi->add_option("--margin", config.margin, "exploration box margin");

    auto* oracle = app.add_subcommand("renewal-oracle", "exact enumeration oracle");
    add_common(oracle, config, config_file);
    oracle->add_option("--dim", config.dim, "lattice dimension");
    oracle->add_option("--p", config.p, "edge probability (rational, e.g. 9/20)");
    oracle->add_option("--width", config.width, "transverse truncation W");
    oracle->add_option("--len", config.len, "slab length along the direction");
    oracle->add_option("--direction", config.direction, "slab direction");

    auto* report = app.add_subcommand("report", "aggregate run reports");
    report->add_option("dir", report_dir, "directory of run manifests")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : percbridge::kExitConfigError;
    }

    try {
        if (report->parsed()) return percbridge::run_report(report_dir, std::cout);
        for (auto* cmd : {bridge, perc, clt, xi, oracle})
            if (cmd->parsed()) {
                config.kind = cmd->get_name();
                return dispatch(config, config_file, cmd);
            }
        return percbridge::kExitConfigError;
    } catch (const percbridge::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case percbridge::Errc::config_error:
                return percbridge::kExitConfigError;
            case percbridge::Errc::attempt_budget_exhausted:
            case percbridge::Errc::table_budget_exceeded:
            case percbridge::Errc::enumeration_budget_exceeded:
            case percbridge::Errc::cap_exceeded:
                return percbridge::kExitBudgetExhausted;
            default:
                return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
