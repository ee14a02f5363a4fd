#include "pinchflow/solver.hpp"

#include <algorithm>
#include <cmath>

#include "pinchflow/errors.hpp"
#include "pinchflow/grid.hpp"
#include "pinchflow/interp.hpp"
#include "pinchflow/kernels/kernels.hpp"
#include "pinchflow/tridiag.hpp"

namespace pinchflow {

const char* run_status_name(RunStatus s) {
    switch (s) {
    case RunStatus::pinched: return "pinched";
    case RunStatus::boundary_contaminated: return "boundary_contaminated";
    case RunStatus::gradient_blowup: return "gradient_blowup";
    case RunStatus::max_steps: return "max_steps";
    }
    return "?";
}

RunStatus run_status_from_name(const std::string& name) {
    if (name == "pinched") return RunStatus::pinched;
    if (name == "boundary_contaminated") return RunStatus::boundary_contaminated;
    if (name == "gradient_blowup") return RunStatus::gradient_blowup;
    if (name == "max_steps") return RunStatus::max_steps;
    throw DomainError("unknown run status: " + name);
}

void SolverConfig::validate() const {
    if (grid_size < 16) throw DomainError("SolverConfig: grid_size must be >= 16");
    if (!(domain_radius > 0.0)) throw DomainError("SolverConfig: domain_radius must be > 0");
    if (!(cfl_safety > 0.0 && cfl_safety < 1.0))
        throw DomainError("SolverConfig: cfl_safety must be in (0,1)");
    if (!(dt_min > 0.0 && dt_max > 0.0 && dt_min <= dt_max))
        throw DomainError("SolverConfig: need 0 < dt_min <= dt_max");
    if (!(pinch_threshold > 0.0))
        throw DomainError("SolverConfig: pinch_threshold must be > 0");
    if (!(gradient_abort > 0.0))
        throw DomainError("SolverConfig: gradient_abort must be > 0");
    if (refinement_levels < 0 || refinement_levels > 24)
        throw DomainError("SolverConfig: refinement_levels out of range");
    if (max_steps < 1) throw DomainError("SolverConfig: max_steps must be >= 1");
    if (!(rescaled_domain > 1.0))
        throw DomainError("SolverConfig: rescaled_domain must be > 1");
    if (!(switch_ratio > 0.0 && switch_ratio < 1.0))
        throw DomainError("SolverConfig: switch_ratio must be in (0,1)");
    if (!(snapshot_dtau > 0.0))
        throw DomainError("SolverConfig: snapshot_dtau must be > 0");
}

namespace {

// Frame-specific drift coefficient of the first-derivative term:
// (m-1)/r in the unscaled frame, (m-1)/rho - rho/2 in the rescaled one.
std::vector<double> make_drift(std::span<const double> r, int m, bool rescaled) {
    std::vector<double> c(r.size(), 0.0);
    for (std::size_t i = 1; i < r.size(); ++i) {
        c[i] = (m - 1) / r[i];
        if (rescaled) c[i] -= 0.5 * r[i];
    }
    return c;
}

struct Stepper {
    std::vector<double> radii;
    kern::Stencil st;
    std::vector<double> drift;
    double lin;
    bool rescaled;
    int m;
    double k;
    double h0, h_last, h_min2;
    // workspace
    std::vector<double> grad, lower, diag, upper, rhs;

    Stepper(std::vector<double> r, const FlowGeometry& g, bool rescaled_frame)
        : radii(std::move(r)),
          st(kern::make_stencil(radii)),
          drift(make_drift(radii, g.axis_dim, rescaled_frame)),
          lin(rescaled_frame ? 0.5 : 0.0),
          rescaled(rescaled_frame),
          m(g.axis_dim),
          k(g.fiber_dim) {
        const std::size_t n = radii.size();
        h0 = radii[1] - radii[0];
        h_last = radii[n - 1] - radii[n - 2];
        double hm = h0;
        for (std::size_t i = 1; i < n; ++i) hm = std::min(hm, radii[i] - radii[i - 1]);
        h_min2 = hm * hm;
        grad.assign(n, 0.0);
        lower.assign(n, 0.0);
        diag.assign(n, 0.0);
        upper.assign(n, 0.0);
        rhs.assign(n, 0.0);
    }

    // One semi-implicit step of the values in u; the result lands in out.
    // Returns nullptr when accepted, else the rejection reason.
    const char* advance(const std::vector<double>& u, double dt, double dirichlet_value,
                        OuterBc bc, double gradient_abort, std::vector<double>& out) {
        const auto& kt = kern::kernels();
        const std::size_t n = radii.size();
        out.resize(n);

        kt.gradient_interior(u.data(), st, grad.data(), n);
        grad[0] = 0.0;
        grad[n - 1] = (u[n - 1] - u[n - 2]) / h_last;

        kt.assemble_interior(u.data(), grad.data(), st, drift.data(), dt, lin, k,
                             lower.data(), diag.data(), upper.data(), rhs.data(), n);

        // Axis row: u_r(0) = 0 by symmetry; the full second-order coefficient
        // is m (diffusion 1 plus the drift limit m-1), all implicit.
        const double s0 = 2.0 / (h0 * h0);
        lower[0] = 0.0;
        diag[0] = 1.0 + dt * m * s0;
        upper[0] = -dt * m * s0;
        rhs[0] = u[0] + dt * (lin * u[0] - k / u[0]);

        // Outer row.
        upper[n - 1] = 0.0;
        if (!rescaled) {
            if (bc == OuterBc::dirichlet) {
                lower[n - 1] = 0.0;
                diag[n - 1] = 1.0;
                rhs[n - 1] = std::isnan(dirichlet_value) ? u[n - 1] : dirichlet_value;
            } else {
                // mirror ghost: u_r = 0, u_rr = 2 (u[n-2]-u[n-1]) / h^2
                const double s = 2.0 / (h_last * h_last);
                lower[n - 1] = -dt * s;
                diag[n - 1] = 1.0 + dt * s;
                rhs[n - 1] = u[n - 1] + dt * (lin * u[n - 1] - k / u[n - 1]);
            }
        } else {
            // Outflow: the drift velocity points outward at the edge, so a
            // one-sided upwind row is well posed; diffusion is dropped there.
            const double c = (m - 1) / radii[n - 1] - 0.5 * radii[n - 1];
            if (c < 0.0) {
                lower[n - 1] = dt * c / h_last;
                diag[n - 1] = 1.0 - dt * c / h_last;
                rhs[n - 1] = u[n - 1] + dt * (lin * u[n - 1] - k / u[n - 1]);
            } else {
                lower[n - 1] = 0.0;
                diag[n - 1] = 1.0;
                rhs[n - 1] = u[n - 1];
            }
        }

        solve_tridiagonal(lower, diag, upper, rhs);

        std::size_t arg = 0;
        if (!(kt.min_element(rhs.data(), n, &arg) > 0.0)) return "positivity";

        kt.gradient_interior(rhs.data(), st, grad.data(), n);
        grad[0] = 0.0;
        grad[n - 1] = (rhs[n - 1] - rhs[n - 2]) / h_last;
        if (kt.max_abs(grad.data(), n) > gradient_abort) return "gradient";

        out.swap(rhs);
        rhs.resize(n);
        return nullptr;
    }
};

std::vector<double> full_rhs(const GridProfile& p, const FlowGeometry& g, bool rescaled) {
    p.validate();
    g.validate();
    const std::size_t n = p.size();
    const auto st = kern::make_stencil(p.radii);
    const auto drift = make_drift(p.radii, g.axis_dim, rescaled);
    const double lin = rescaled ? 0.5 : 0.0;
    const double k = g.fiber_dim;
    std::vector<double> out(n, 0.0);
    kern::kernels().rhs_interior(p.values.data(), st, drift.data(), lin, k, out.data(), n);
    const double h0 = p.radii[1] - p.radii[0];
    const double urr0 = 2.0 * (p.values[1] - p.values[0]) / (h0 * h0);
    out[0] = g.axis_dim * urr0 + lin * p.values[0] - k / p.values[0];
    out[n - 1] = 0.0;
    return out;
}

struct LinFit {
    double t_star = 0.0;
    double slope = 0.0;
    double rms = 0.0;
    bool ok = false;
};

// Least squares of u_min^2 over t; the root gives T*. Sums are centered:
// near the pinch the fitted window is t_star +- 1e-10 while t itself is
// O(1), so uncentered normal equations would cancel catastrophically.
LinFit fit_pinch_time(std::span<const MinSample> tail) {
    LinFit f;
    const std::size_t n = tail.size();
    if (n < 3) return f;
    const double t_ref = tail.back().t;
    double mx = 0, my = 0;
    for (const auto& s : tail) {
        mx += s.t - t_ref;
        my += s.u_min * s.u_min;
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (const auto& s : tail) {
        const double dx = (s.t - t_ref) - mx;
        sxx += dx * dx;
        sxy += dx * (s.u_min * s.u_min - my);
    }
    if (sxx == 0.0) return f;
    const double B = sxy / sxx;
    if (!(B < 0.0) || !std::isfinite(B)) return f;
    double ss = 0;
    for (const auto& s : tail) {
        const double e = (s.u_min * s.u_min - my) - B * ((s.t - t_ref) - mx);
        ss += e * e;
    }
    f.t_star = t_ref + mx - my / B;
    f.slope = B;
    f.rms = std::sqrt(ss / n);
    f.ok = std::isfinite(f.t_star);
    return f;
}

// Monotone tail of the series with u_min <= bound (scanned from the end,
// stopping at the first sample above the bound).
std::vector<MinSample> series_tail(std::span<const MinSample> series, double bound) {
    std::vector<MinSample> tail;
    for (std::size_t i = series.size(); i-- > 0;) {
        if (!(series[i].u_min <= bound)) break;
        tail.push_back(series[i]);
    }
    return tail;
}

bool profile_is_flat(std::span<const double> values) {
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return (hi - lo) <= 1e-6 * lo;
}

} // namespace

std::vector<double> mcf_rhs(const GridProfile& p, const FlowGeometry& g) {
    if (p.frame != Frame::unscaled)
        throw DomainError("mcf_rhs: expects an unscaled profile");
    return full_rhs(p, g, false);
}

std::vector<double> rescaled_rhs(const GridProfile& p, const FlowGeometry& g) {
    if (p.frame != Frame::rescaled)
        throw DomainError("rescaled_rhs: expects a rescaled profile");
    return full_rhs(p, g, true);
}

StepResult step(const GridProfile& p, double dt, const FlowGeometry& g,
                const SolverConfig& cfg) {
    cfg.validate();
    g.validate();
    p.validate();
    if (p.frame == Frame::secondary)
        throw DomainError("step: the secondary frame is transform-only");
    if (!(dt >= cfg.dt_min && dt <= cfg.dt_max))
        throw DomainError("step: dt outside [dt_min, dt_max]");
    Stepper s(p.radii, g, p.frame == Frame::rescaled);
    StepResult res;
    std::vector<double> out;
    const char* reason =
        s.advance(p.values, dt, cfg.outer_bc_value, cfg.outer_bc, cfg.gradient_abort, out);
    if (reason) {
        res.accepted = false;
        res.reject_reason = reason;
        res.profile = p;
        return res;
    }
    res.accepted = true;
    res.profile.radii = p.radii;
    res.profile.values = std::move(out);
    res.profile.frame = p.frame;
    res.profile.timestamp = p.timestamp + dt;
    return res;
}

RunRecord run_to_pinch(const SolverConfig& cfg, const FlowGeometry& g,
                       const GridProfile& initial) {
    cfg.validate();
    g.validate();
    initial.validate();
    if (initial.frame != Frame::unscaled)
        throw DomainError("run_to_pinch: initial data must be unscaled");

    const auto& kt = kern::kernels();
    RunRecord rec;
    rec.geometry = g;
    const double k = g.fiber_dim;

    Stepper A(initial.radii, g, false);
    std::vector<double> u = initial.values;
    std::vector<double> u_next;
    double t = initial.timestamp;
    long steps = 0;

    std::size_t arg0 = 0;
    const double u_min0 = kt.min_element(u.data(), u.size(), &arg0);
    const double switch_level = cfg.switch_ratio * u_min0;
    const double dirichlet_value =
        std::isnan(cfg.outer_bc_value) ? u.back() : cfg.outer_bc_value;

    auto store_unscaled = [&]() {
        GridProfile s;
        s.radii = A.radii;
        s.values = u;
        s.frame = Frame::unscaled;
        s.timestamp = t;
        rec.snapshots.push_back(std::move(s));
        rec.snapshot_meta.push_back(
            {t, std::numeric_limits<double>::quiet_NaN()});
    };

    auto finalize = [&](RunStatus status, std::span<const double> final_values) {
        rec.status = status;
        rec.total_steps = steps;
        rec.degenerate_pinch =
            (status == RunStatus::pinched) && profile_is_flat(final_values);
        if (status == RunStatus::pinched) {
            try {
                const auto est = estimate_blowup_time(rec);
                rec.t_star = est.t_star;
                rec.t_star_uncertainty = est.uncertainty;
            } catch (const DomainError&) {
                // too few tail samples; leave t_star NaN
            }
        }
    };

    // ---- phase A: unscaled frame on the supplied grid ----
    double last_snap_log = std::numeric_limits<double>::infinity();
    while (true) {
        std::size_t arg = 0;
        const double u_min = kt.min_element(u.data(), u.size(), &arg);
        rec.min_radius_series.push_back({t, u_min, A.radii[arg]});

        if (u_min <= cfg.pinch_threshold) {
            store_unscaled();
            finalize(RunStatus::pinched, u);
            return rec;
        }
        // a genuine pinch forming within 10 cells of the outer wall; flat
        // profiles (argmin meaningless) are exempt
        if (arg + 10 >= u.size() && u_min <= 0.5 * u_min0 && u_min < 0.9 * u[0]) {
            store_unscaled();
            finalize(RunStatus::boundary_contaminated, u);
            return rec;
        }
        if (u_min <= switch_level) break;
        if (steps >= cfg.max_steps) {
            store_unscaled();
            finalize(RunStatus::max_steps, u);
            return rec;
        }
        if (std::fabs(std::log(u_min) - last_snap_log) >= 0.5 * cfg.snapshot_dtau ||
            !std::isfinite(last_snap_log)) {
            store_unscaled();
            last_snap_log = std::log(u_min);
        }

        double dt = std::clamp(cfg.cfl_safety * std::min(u_min * u_min, A.h_min2),
                               cfg.dt_min, cfg.dt_max);
        while (true) {
            const char* reason = A.advance(u, dt, dirichlet_value, cfg.outer_bc,
                                           cfg.gradient_abort, u_next);
            if (!reason) break;
            if (dt <= cfg.dt_min) {
                store_unscaled();
                finalize(reason == std::string("gradient") ? RunStatus::gradient_blowup
                                                           : RunStatus::max_steps,
                         u);
                return rec;
            }
            dt = std::max(0.5 * dt, cfg.dt_min);
        }
        u.swap(u_next);
        t += dt;
        ++steps;
    }

    // ---- phase B: rescaled frame on a uniform zoom grid ----
    rec.switch_t = t;

    std::size_t argm = 0;
    double u_min_here = kt.min_element(u.data(), u.size(), &argm);
    double t_star = t + u_min_here * u_min_here / (2.0 * k); // cylinder law fallback
    {
        // prefit over the samples past the initial transient
        std::vector<MinSample> tail;
        for (const auto& s : rec.min_radius_series)
            if (s.u_min <= 0.6 * u_min0) tail.push_back(s);
        if (tail.size() >= 20) {
            const LinFit f = fit_pinch_time(tail);
            if (f.ok && f.t_star > t) t_star = f.t_star;
        }
    }

    double tau = -std::log(t_star - t);
    rec.switch_tau = tau;

    const double y_max =
        std::min(cfg.rescaled_domain, 0.98 * A.radii.back() / std::sqrt(t_star - t));
    Stepper B(make_uniform_grid(y_max, cfg.grid_size), g, true);
    const std::size_t nB = B.radii.size();

    std::vector<double> v(nB);
    {
        MonotoneCubic fu(A.radii, u);
        const double root = std::sqrt(t_star - t);
        for (std::size_t i = 0; i < nB; ++i) v[i] = fu(B.radii[i] * root) / root;
    }

    auto store_rescaled = [&]() {
        GridProfile s;
        s.radii = B.radii;
        s.values = v;
        s.frame = Frame::rescaled;
        s.timestamp = tau;
        rec.snapshots.push_back(std::move(s));
        rec.snapshot_meta.push_back({t, t_star});
    };

    double next_snap_tau = (std::floor(tau / cfg.snapshot_dtau) + 1.0) * cfg.snapshot_dtau;
    long since_refit = 0;
    std::vector<double> v_next, v_tmp;

    while (true) {
        std::size_t arg = 0;
        const double v_min = kt.min_element(v.data(), nB, &arg);
        const double shrink = std::exp(-0.5 * tau);
        const double u_min = v_min * shrink;
        t = t_star - std::exp(-tau);
        rec.min_radius_series.push_back({t, u_min, B.radii[arg] * shrink});

        if (u_min <= cfg.pinch_threshold) {
            store_rescaled();
            finalize(RunStatus::pinched, v);
            return rec;
        }
        if (arg + 10 >= nB && v_min < 0.9 * v[0]) {
            store_rescaled();
            finalize(RunStatus::boundary_contaminated, v);
            return rec;
        }
        if (steps >= cfg.max_steps) {
            store_rescaled();
            finalize(RunStatus::max_steps, v);
            return rec;
        }
        if (tau >= next_snap_tau) {
            store_rescaled();
            while (next_snap_tau <= tau) next_snap_tau += cfg.snapshot_dtau;
        }

        // The frame drifts when t_star is off: v collapses (overestimate) or
        // inflates (underestimate), exponentially fast. Refit on a schedule
        // and immediately when v_min leaves a healthy band around sqrt(2k).
        const double v_anchor = std::sqrt(2.0 * k);
        const bool off_band =
            v_min < 0.75 * v_anchor || v_min > 1.4 * v_anchor;
        if (since_refit >= 100 || (off_band && since_refit >= 5)) {
            since_refit = 0;
            const auto tail = series_tail(rec.min_radius_series, 10.0 * u_min);
            if (tail.size() >= 30) {
                const LinFit f = fit_pinch_time(tail);
                if (f.ok && f.t_star > t) {
                    const double lam =
                        std::sqrt((f.t_star - t) / (t_star - t));
                    if (lam > 0.5 && lam < 2.0 && std::fabs(lam - 1.0) > 1e-15) {
                        MonotoneCubic fv(B.radii, v);
                        v_tmp.resize(nB);
                        const double top = B.radii.back();
                        for (std::size_t i = 0; i < nB; ++i)
                            v_tmp[i] = fv(std::min(lam * B.radii[i], top)) / lam;
                        v.swap(v_tmp);
                        t_star = f.t_star;
                        // next_snap_tau stays put: it only ever grows, so a
                        // backward tau jump cannot duplicate a snapshot and a
                        // forward jump emits at the next loop head
                        tau = -std::log(t_star - t);
                    }
                }
            }
        }

        double dtau = std::clamp(cfg.cfl_safety * std::min(v_min * v_min, B.h_min2),
                                 cfg.dt_min, cfg.dt_max);
        while (true) {
            const char* reason = B.advance(v, dtau, 0.0, cfg.outer_bc,
                                           cfg.gradient_abort, v_next);
            if (!reason) break;
            if (dtau <= cfg.dt_min) {
                store_rescaled();
                finalize(reason == std::string("gradient") ? RunStatus::gradient_blowup
                                                           : RunStatus::max_steps,
                         v);
                return rec;
            }
            dtau = std::max(0.5 * dtau, cfg.dt_min);
        }
        v.swap(v_next);
        tau += dtau;
        ++steps;
        ++since_refit;
    }
}

BlowupEstimate estimate_blowup_time(const RunRecord& rec) {
    if (rec.status != RunStatus::pinched)
        throw DomainError("estimate_blowup_time: run did not pinch");
    if (rec.min_radius_series.empty())
        throw DomainError("estimate_blowup_time: empty series");
    const double u_last = rec.min_radius_series.back().u_min;
    const auto tail = series_tail(rec.min_radius_series, 10.0 * u_last);
    if (tail.size() < 10)
        throw DomainError("estimate_blowup_time: insufficient samples in the last decade");
    const LinFit f = fit_pinch_time(tail);
    if (!f.ok) throw DomainError("estimate_blowup_time: degenerate fit");
    BlowupEstimate est;
    est.t_star = f.t_star;
    est.uncertainty = f.rms / std::fabs(f.slope);
    est.samples_used = static_cast<int>(tail.size());
    return est;
}

} // namespace pinchflow
