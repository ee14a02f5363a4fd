#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pinchflow/run_io.hpp"

namespace pinchflow {

/// Exit-code table shared by the CLI and the pipeline drivers:
///   0 ok, 1 internal error, 2 configuration error,
///   3 boundary_contaminated, 4 gradient_blowup, 5 max_steps,
///   6 claim failure.
int exit_code_for(RunStatus s);

struct SimulateResult {
    RunRecord record;
    int exit_code = 0;
};

/// Run the configured simulation and persist it under out_dir.
SimulateResult simulate_to_dir(const RunConfig& cfg,
                               const std::filesystem::path& out_dir);

/// Fit every rescaled snapshot of a persisted run and write
/// series/fit_series.csv and series/final_ratio.csv.
std::vector<FitRow> analyze_run_dir(const std::filesystem::path& dir);

struct VerifyOutcome {
    std::vector<VerificationReport> reports;
    bool any_fail = false;
    bool any_inconclusive = false;
};

extern const std::vector<std::string> kAllClaims;

/// Run the requested claims (default: all) against a persisted, analyzed run
/// and write reports/. Unknown claim names raise ConfigError.
VerifyOutcome verify_run_dir(const std::filesystem::path& dir,
                             const std::vector<std::string>& claims);

/// Emit the five gnuplot scripts under plots/ (requires analyzed series).
std::vector<std::string> emit_plot_scripts(const std::filesystem::path& dir);

struct SweepSpec {
    // axis key -> list of values, in declaration order
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
};

/// Parse "key=v1,v2;key2=w1,w2" into a sweep grid.
SweepSpec parse_sweep_grid(const std::string& text);

struct SweepCell {
    std::string dir;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string status; // run status name or "error: ..."
    int exit_code = 0;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    int exit_code = 0; // worst cell code
};

/// Cartesian-product sweep over the template config; duplicate cells are
/// dropped; independent cells run on a small worker pool. Failures are
/// recorded per cell and the sweep continues.
SweepResult sweep_run(const RunConfig& tmpl, const SweepSpec& spec, int jobs,
                      const std::filesystem::path& out_dir);

} // namespace pinchflow
