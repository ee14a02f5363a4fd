#pragma once

#include <limits>
#include <string>
#include <vector>

#include "pinchflow/geometry.hpp"

namespace pinchflow {

enum class RunStatus { pinched, boundary_contaminated, gradient_blowup, max_steps };

const char* run_status_name(RunStatus s);
RunStatus run_status_from_name(const std::string& name);

enum class OuterBc { dirichlet, neumann_zero };

struct SolverConfig {
    int grid_size = 2048;
    double domain_radius = 20.0;
    OuterBc outer_bc = OuterBc::dirichlet;
    // Dirichlet value at r = domain_radius; NaN means "hold the initial edge
    // value", which is the common case.
    double outer_bc_value = std::numeric_limits<double>::quiet_NaN();
    double cfl_safety = 0.3;
    double dt_min = 1e-15;
    double dt_max = 1e-2;
    double pinch_threshold = 3e-6; // stop once min u falls below this
    double gradient_abort = 50.0;  // abort when max |u_r| exceeds this
    int refinement_levels = 0;     // dyadic near-axis refinement (0 = none)
    long max_steps = 5000000;

    // Late stage: once min u <= switch_ratio * initial min, integration
    // continues in the rescaled frame on a uniform grid over
    // [0, rescaled_domain] to retain resolution near the pinch.
    double rescaled_domain = 40.0;
    double switch_ratio = 0.2;

    double snapshot_dtau = 0.25; // snapshot cadence, equispaced in tau

    void validate() const;
};

struct MinSample {
    double t;        // unscaled time
    double u_min;    // min radius over the grid
    double argmin_r; // unscaled radius where the minimum sits
};

struct SnapshotMeta {
    double t_unscaled;  // unscaled time of the snapshot
    double t_star_used; // blow-up estimate active when it was taken (NaN in phase A)
};

struct RunRecord {
    std::string config_hash;
    FlowGeometry geometry;
    std::vector<GridProfile> snapshots;
    std::vector<SnapshotMeta> snapshot_meta; // parallel to snapshots
    std::vector<MinSample> min_radius_series;
    double t_star = std::numeric_limits<double>::quiet_NaN();
    double t_star_uncertainty = std::numeric_limits<double>::quiet_NaN();
    RunStatus status = RunStatus::max_steps;
    bool degenerate_pinch = false; // r-independent collapse (argmin undefined)
    double switch_tau = std::numeric_limits<double>::quiet_NaN();
    double switch_t = std::numeric_limits<double>::quiet_NaN();
    long total_steps = 0;
};

/// Right-hand side of the radial-graph evolution
///   u_t = u_rr/(1+u_r^2) + (m-1) u_r/r - k/u
/// at every grid point. At r = 0 the axis limit m*u_rr(0) - k/u(0) is used
/// (u_r(0) = 0 by symmetry). The last entry is boundary-owned and set to 0.
std::vector<double> mcf_rhs(const GridProfile& p, const FlowGeometry& g);

/// Right-hand side of the rescaled flow
///   v_tau = v_rr/(1+v_r^2) + (m-1) v_r/rho - (rho/2) v_r + v/2 - k/v
/// with the same endpoint conventions.
std::vector<double> rescaled_rhs(const GridProfile& p, const FlowGeometry& g);

struct StepResult {
    GridProfile profile;
    bool accepted = false;
    std::string reject_reason; // "positivity" or "gradient" when rejected
};

/// One semi-implicit step: second-derivative and drift terms go through a
/// linearized tridiagonal solve with the graph factor frozen at the current
/// state; the reaction -k/u (and v/2 in the rescaled frame) stays explicit.
/// A step producing a nonpositive value or a gradient above
/// cfg.gradient_abort is rejected (caller halves dt and retries).
StepResult step(const GridProfile& p, double dt, const FlowGeometry& g,
                const SolverConfig& cfg);

/// Integrate from the initial profile until min u <= cfg.pinch_threshold or
/// an abort condition. Snapshots follow a geometric schedule in (T*-t), i.e.
/// equispaced in tau.
RunRecord run_to_pinch(const SolverConfig& cfg, const FlowGeometry& g,
                       const GridProfile& initial);

struct BlowupEstimate {
    double t_star = 0.0;
    double uncertainty = 0.0;
    int samples_used = 0;
};

/// Least-squares fit of u_min^2(t) ~ slope * (T* - t) over the last decade of
/// u_min. Needs status == pinched and at least 10 samples with
/// u_min < 10 * cfg pinch threshold (the threshold is inferred from the final
/// sample). The returned uncertainty is the fit rms mapped to time units.
BlowupEstimate estimate_blowup_time(const RunRecord& rec);

} // namespace pinchflow
