#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "eitsim/sweep.hpp"

namespace {

// Exit codes shared by all subcommands: 0 clean run, 2 unusable config or
// command line, 3 a steady state failed to converge (the row is flagged and
// the run still completes), 4 not a single stable point in the run.
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNonConverged = 3;
constexpr int kAllUnstable = 4;

int write_table(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return kOk;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.flush();
    if (!out) {
        std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
        return kConfigError;
    }
    return kOk;
}

int sweep_cmd(const std::string& config, bool oracle, const std::string& out) {
    eitsim::SweepConfig cfg = eitsim::load_sweep_config(config);
    if (oracle) cfg.oracle = true;
    const eitsim::SweepResult result = eitsim::run_sweep(cfg);
    const int wrote =
        write_table(eitsim::sweep_csv(result, cfg.oracle), out.empty() ? cfg.out : out);
    if (wrote != kOk) return wrote;
    if (result.all_unstable) return kAllUnstable;
    if (result.any_nonconverged) return kNonConverged;
    return kOk;
}

int bistab_cmd(const std::string& config, const std::string& out) {
    const eitsim::SweepConfig cfg = eitsim::load_sweep_config(config);
    const eitsim::BistabilityResult result = eitsim::run_bistability(cfg);
    const int wrote =
        write_table(eitsim::bistability_csv(result), out.empty() ? cfg.out : out);
    if (wrote != kOk) return wrote;
    for (const eitsim::BistabilityRow& row : result.rows) {
        if (row.stable) return kOk;
    }
    return kAllUnstable;
}

int point_cmd(const std::string& config) {
    const eitsim::SweepConfig cfg = eitsim::load_sweep_config(config);
    const eitsim::PointReport rep = eitsim::point_report(cfg);
    std::fputs(rep.json.c_str(), stdout);
    if (!rep.converged) return kNonConverged;
    if (!rep.stable) return kAllUnstable;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-beam EIT noise spectra, bistability branches and "
                 "entanglement criteria"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    bool oracle = false;

    CLI::App* sweep = app.add_subcommand(
        "sweep", "Sweep one parameter; CSV of spectra and criteria per point");
    sweep->add_option("--config", config, "flat key = value parameter file")
        ->required();
    sweep->add_flag("--oracle", oracle,
                    "append Monte Carlo estimates and standard errors");
    sweep->add_option("--out", out, "output path (default: stdout)");

    CLI::App* bistab = app.add_subcommand(
        "bistab", "Continue the steady state in drive; CSV of the branch");
    bistab->add_option("--config", config, "flat key = value parameter file")
        ->required();
    bistab->add_option("--out", out, "output path (default: stdout)");

    CLI::App* point = app.add_subcommand(
        "point", "Single operating point; JSON report to stdout");
    point->add_option("--config", config, "flat key = value parameter file")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (sweep->parsed()) return sweep_cmd(config, oracle, out);
        if (bistab->parsed()) return bistab_cmd(config, out);
        return point_cmd(config);
    } catch (const eitsim::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    } catch (const std::runtime_error& e) {
        // Continuation and solver failures: the physics ran but did not
        // converge everywhere.
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNonConverged;
    }
}
