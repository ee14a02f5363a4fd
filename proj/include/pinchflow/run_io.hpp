#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "pinchflow/config.hpp"
#include "pinchflow/solver.hpp"
#include "pinchflow/verify.hpp"

namespace pinchflow {

/// Run directory layout:
///   config.cfg                 canonical configuration
///   manifest.json              status, T*, snapshot index, series paths
///   snapshots/snap_NNNNNN.csv  header "# frame, timestamp, m, k", rows r,u
///   series/min_radius.csv      t,u_min,argmin_r
///   series/fit_series.csv      written by analyze
///   series/final_ratio.csv     written by analyze
///   reports/<claim>.json       written by verify
///   plots/*.gp                 written by plot
/// All numeric output is printed with 17 significant digits; nothing
/// time-of-day dependent is stored, so identical configs give byte-identical
/// directories.
void write_run(const std::filesystem::path& dir, const RunConfig& cfg,
               const RunRecord& rec);

struct LoadedRun {
    RunConfig config;
    RunRecord record;
};

LoadedRun load_run(const std::filesystem::path& dir);

struct FitRow {
    double tau, a, b, omega, res_l2, norm_w3, norm_w2_grad, norm_w1_hess;
};

void write_fit_series(const std::filesystem::path& dir, std::span<const FitRow> rows);
std::vector<FitRow> load_fit_series(const std::filesystem::path& dir);

struct RatioRow {
    double x, u_final, ratio, tau_used;
};

void write_final_ratio(const std::filesystem::path& dir, std::span<const RatioRow> rows);
std::vector<RatioRow> load_final_ratio(const std::filesystem::path& dir);

void write_reports(const std::filesystem::path& dir,
                   std::span<const VerificationReport> reports);

/// Single snapshot CSV (exposed for tests and external tooling).
void write_snapshot_csv(const std::filesystem::path& file, const GridProfile& p,
                        const FlowGeometry& g);
GridProfile read_snapshot_csv(const std::filesystem::path& file);

} // namespace pinchflow
