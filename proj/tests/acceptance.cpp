// Acceptance suite: one pass/fail line per criterion, exit 0 only when all
// criteria hold. The long generic-pinch run is shared by criteria 6-8.
// Usage: acceptance <path-to-pinchflow-cli>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pinchflow/config.hpp"
#include "pinchflow/frames.hpp"
#include "pinchflow/grid.hpp"
#include "pinchflow/harness.hpp"
#include "pinchflow/profile_fit.hpp"
#include "pinchflow/run_io.hpp"
#include "pinchflow/solver.hpp"
#include "pinchflow/verify.hpp"

using namespace pinchflow;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
bool g_all_pass = true;

void report(int n, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", n,
                what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) g_all_pass = false;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

int run_cli(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

fs::path fresh_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("pinchflow_acc_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool trees_identical(const fs::path& a, const fs::path& b) {
    std::vector<fs::path> ra, rb;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) ra.push_back(fs::relative(e.path(), a));
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) rb.push_back(fs::relative(e.path(), b));
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    if (ra != rb) return false;
    for (const auto& r : ra)
        if (slurp(a / r) != slurp(b / r)) return false;
    return true;
}

// ---- criterion 1: exact-cylinder oracle --------------------------------

void c1_exact_cylinder() {
    const double t0 = now_seconds();
    FlowGeometry g{3, 1};
    SolverConfig cfg;
    cfg.outer_bc = OuterBc::neumann_zero;
    cfg.dt_min = 1e-12;
    cfg.dt_max = 1.0;
    GridProfile p;
    p.frame = Frame::unscaled;
    p.timestamp = 0.0;
    p.radii = make_uniform_grid(5.0, 512);
    p.values.assign(512, 2.0);

    const double dt = 2.5e-5;
    bool ok = true;
    while (p.timestamp < 1.0 - 1e-12) {
        const auto res = step(p, std::min(dt, 1.0 - p.timestamp), g, cfg);
        if (!res.accepted) {
            ok = false;
            break;
        }
        p = res.profile;
    }
    double worst = 0.0;
    const double exact = std::sqrt(4.0 - 2.0 * p.timestamp);
    for (double u : p.values) worst = std::max(worst, std::fabs(u / exact - 1.0));
    const double wall = now_seconds() - t0;
    ok = ok && worst <= 1e-5 && wall < 5.0;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "max rel err %.3g <= 1e-5, wall %.2fs < 5s",
                  worst, wall);
    report(1, ok, "exact-cylinder oracle, grid 512 to t=1", buf);
}

// ---- criterion 2: self-shrinker fixed point ----------------------------

void c2_fixed_point() {
    FlowGeometry g{3, 1};
    SolverConfig cfg;
    cfg.dt_min = 1e-12;
    cfg.dt_max = 1.0;
    GridProfile v;
    v.frame = Frame::rescaled;
    v.timestamp = 0.0;
    v.radii = make_uniform_grid(8.0, 512);
    v.values.assign(512, std::sqrt(2.0));
    bool ok = true;
    const double dtau = 1e-3;
    for (int i = 0; i < 5000 && ok; ++i) {
        const auto res = step(v, dtau, g, cfg);
        ok = res.accepted;
        v = res.profile;
    }
    double worst = 0.0;
    for (double x : v.values) worst = std::max(worst, std::fabs(x - std::sqrt(2.0)));
    ok = ok && worst <= 1e-6;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "sup |v - sqrt2| = %.3g <= 1e-6 over tau-span 5",
                  worst);
    report(2, ok, "self-shrinker fixed point", buf);
}

// ---- criterion 3: spatial self-convergence -----------------------------

std::vector<double> evolve_bump(int n, double dt, int steps) {
    FlowGeometry g{3, 1};
    SolverConfig cfg;
    cfg.dt_min = 1e-12;
    cfg.dt_max = 1.0;
    GridProfile p;
    p.frame = Frame::unscaled;
    p.timestamp = 0.0;
    p.radii = make_uniform_grid(5.0, n);
    p.values.resize(p.radii.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p.values[i] = 2.0 + 0.8 * std::exp(-p.radii[i] * p.radii[i]);
    for (int s = 0; s < steps; ++s) {
        const auto res = step(p, dt, g, cfg);
        if (!res.accepted) return {};
        p = res.profile;
    }
    return p.values;
}

void c3_convergence() {
    const double dt = 1e-6;
    const int steps = 5000;
    const auto u1 = evolve_bump(129, dt, steps);
    const auto u2 = evolve_bump(257, dt, steps);
    const auto u4 = evolve_bump(513, dt, steps);
    double e12 = 0.0, e24 = 0.0;
    for (std::size_t i = 0; i < u1.size(); ++i)
        e12 = std::max(e12, std::fabs(u1[i] - u2[2 * i]));
    for (std::size_t i = 0; i < u2.size(); ++i)
        e24 = std::max(e24, std::fabs(u2[i] - u4[2 * i]));
    const double ratio = e12 / e24;
    const bool ok = !u1.empty() && ratio >= 3.0 && ratio <= 5.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "error ratio under grid halving %.3f in [3,5]",
                  ratio);
    report(3, ok, "spatial self-convergence on cylinder-plus-bump", buf);
}

// ---- criterion 4: frame transforms -------------------------------------

void c4_frames() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dts(-3.0, -1e-4);
    std::uniform_real_distribution<double> dr(0.02, 0.4);
    std::uniform_real_distribution<double> dv(0.3, 5.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        GridProfile p;
        p.frame = Frame::unscaled;
        p.timestamp = dts(rng);
        p.radii.push_back(0.0);
        for (int i = 1; i < 24; ++i) p.radii.push_back(p.radii.back() + dr(rng));
        for (int i = 0; i < 24; ++i) p.values.push_back(dv(rng));
        const double t_star = (trial % 2) ? 0.0 : 0.37;
        const auto back = from_rescaled(to_rescaled(p, t_star), t_star);
        for (std::size_t i = 0; i < p.size(); ++i) {
            worst = std::max(worst, std::fabs(back.values[i] / p.values[i] - 1.0));
            if (i)
                worst = std::max(worst, std::fabs(back.radii[i] / p.radii[i] - 1.0));
        }
        worst = std::max(worst, std::fabs(back.timestamp - p.timestamp) /
                                    std::max(1.0, std::fabs(p.timestamp)));
        const MatchingPoint mp = matching_tau(1e-3 * (1 + trial % 7));
        GridProfile q = p;
        q.timestamp = mp.t1 * (0.1 + 0.3 * (trial % 3));
        const auto back2 = from_secondary(to_secondary(q, mp), mp);
        for (std::size_t i = 0; i < q.size(); ++i)
            worst = std::max(worst, std::fabs(back2.values[i] / q.values[i] - 1.0));
    }

    double worst_cyl = 0.0;
    for (double t : {-1.0, -0.25, -1e-3, -1e-8}) {
        GridProfile c;
        c.frame = Frame::unscaled;
        c.timestamp = t;
        for (int i = 0; i < 40; ++i) {
            c.radii.push_back(0.1 * i);
            c.values.push_back(std::sqrt(2.0) * std::sqrt(-t));
        }
        const auto v = to_rescaled(c, 0.0);
        for (double x : v.values)
            worst_cyl = std::max(worst_cyl, std::fabs(x / std::sqrt(2.0) - 1.0));
    }
    const bool ok = worst <= 1e-12 && worst_cyl <= 1e-14;
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "1000 round trips worst %.3g <= 1e-12; cylinder map %.3g <= 1e-14",
                  worst, worst_cyl);
    report(4, ok, "frame transforms", buf);
}

// ---- criterion 5: matching-time solver ---------------------------------

void c5_matching() {
    bool ok = true;
    double worst_resid = 0.0;
    for (int e = 2; e <= 32; e += 3) {
        const double x1 = std::pow(10.0, -e);
        const auto mp = matching_tau(x1);
        const double rhs = std::pow(mp.tau1, 0.55);
        worst_resid = std::max(
            worst_resid, std::fabs(std::exp(0.5 * mp.tau1) * x1 - rhs) / rhs);
    }
    ok = ok && worst_resid <= 1e-9;

    double worst_inv = 0.0;
    for (double tau = 5.0; tau <= 200.0; tau += 4.87) {
        const double x1 = std::pow(tau, 0.55) * std::exp(-0.5 * tau);
        worst_inv = std::max(worst_inv,
                             std::fabs(matching_tau(x1).tau1 - tau) / tau);
    }
    ok = ok && worst_inv <= 1e-9;

    const double tau8 = matching_tau(1e-8).tau1;
    ok = ok && std::fabs(tau8 - 40.9) <= 0.1;

    double prev_ratio = 0.0;
    bool increasing = true;
    for (double x1 : {1e-4, 1e-8, 1e-16, 1e-32}) {
        const double ratio = -std::log(x1) / (0.5 * matching_tau(x1).tau1);
        if (!(ratio > prev_ratio && ratio < 1.0)) increasing = false;
        prev_ratio = ratio;
    }
    ok = ok && increasing;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "resid %.2g <= 1e-9, inversion %.2g <= 1e-9, tau1(1e-8)=%.4f, "
                  "ratios increasing toward 1",
                  worst_resid, worst_inv, tau8);
    report(5, ok, "matching-time solver", buf);
}

// ---- criteria 6-8 share the generic-pinch run --------------------------

struct GenericRun {
    RunRecord rec;
    std::vector<FitRow> rows;
    double wall = 0.0;
    bool ok = false;
};

GenericRun run_generic() {
    GenericRun gen;
    RunConfig cfg; // shipped defaults: c0 = 0.9 sqrt2, c2 = 0.25, R = 5
    cfg.solver.refinement_levels = 1;
    const double t0 = now_seconds();
    gen.rec = run_to_pinch(cfg.solver, cfg.geometry, cfg.make_initial());
    gen.wall = now_seconds() - t0;
    if (gen.rec.status != RunStatus::pinched) return gen;
    for (const auto& snap : gen.rec.snapshots) {
        if (snap.frame != Frame::rescaled) continue;
        try {
            const auto fit = fit_profile(snap, cfg.window);
            gen.rows.push_back({fit.tau, fit.a, fit.b, fit.window, fit.residual_l2,
                                fit.norms.at("w3_eta"), fit.norms.at("w2_grad"),
                                fit.norms.at("w1_hess")});
        } catch (const DomainError&) {
        }
    }
    gen.ok = !gen.rows.empty();
    return gen;
}

void c6_profile_trends(const GenericRun& gen) {
    if (!gen.ok) {
        report(6, false, "rescaled-profile trends", "generic run unavailable");
        return;
    }
    double a_lo = 1e300, a_hi = 0.0, w_lo = 1e300, w_hi = 0.0;
    double tau_final = 0.0, taub_final = 0.0;
    for (const auto& r : gen.rows) {
        if (r.tau < 10.0) continue;
        a_lo = std::min(a_lo, std::fabs(r.a - 0.5) * r.tau);
        a_hi = std::max(a_hi, std::fabs(r.a - 0.5) * r.tau);
        w_lo = std::min(w_lo, r.tau * r.tau * r.norm_w3);
        w_hi = std::max(w_hi, r.tau * r.tau * r.norm_w3);
        if (r.tau > tau_final) {
            tau_final = r.tau;
            taub_final = r.tau * r.b;
        }
    }
    const bool ok = gen.wall <= 600.0 && tau_final >= 15.0 &&
                    a_hi / a_lo <= 10.0 && taub_final >= 0.75 &&
                    taub_final <= 1.25 && w_hi / w_lo <= 10.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "wall %.0fs <= 600s, tau_final %.1f, |a-1/2|tau band ratio %.2f "
                  "<= 10, tau*b(final) %.3f in [0.75,1.25], tau^2*w3 ratio %.2f <= 10",
                  gen.wall, tau_final, a_hi / a_lo, taub_final, w_hi / w_lo);
    report(6, ok, "rescaled-profile trends on the generic run", buf);
}

void c7_final_profile(const GenericRun& gen) {
    if (!gen.ok) {
        report(7, false, "final-profile ratio trend", "generic run unavailable");
        return;
    }
    const RunSampler sam(gen.rec);
    const double x_lo = 1.8e-5, x_hi = 5.7e-4; // 1.5 decades, resolvable window
    std::vector<double> xs, devs;
    bool in_band = true;
    for (int i = 0; i < 10; ++i) {
        const double x = x_hi * std::pow(x_lo / x_hi, i / 9.0); // descending
        double tau_used = 0.0;
        const auto u = sam.u_final(x, &tau_used);
        if (!u) continue;
        const double R = *u * std::sqrt(-std::log(x)) / x;
        if (R < 0.6 || R > 1.4) in_band = false;
        xs.push_back(x);
        devs.push_back(std::fabs(R - 1.0));
    }
    bool decreasing = xs.size() >= 8;
    for (std::size_t i = 1; i < devs.size(); ++i)
        if (!(devs[i] <= devs[i - 1] + 1e-12)) decreasing = false;
    const double decades =
        xs.empty() ? 0.0 : std::log10(xs.front() / xs.back());
    const bool ok = in_band && decreasing && decades >= 1.49;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "R in [0.6,1.4] over %.2f decades (%zu radii), |R-1| decreasing "
                  "toward small x",
                  decades, xs.size());
    report(7, ok, "final-profile ratio u*sqrt(-ln x)/x", buf);
}

void c8_stability_and_secondary(const GenericRun& gen) {
    if (!gen.ok) {
        report(8, false, "stability and secondary-frame trends",
               "generic run unavailable");
        return;
    }
    const double pts[] = {0.05, 0.02, 0.008};
    const auto rep = verify_ratio_stability(gen.rec, pts, 0.2);
    bool sup_decreasing = rep.samples.size() == 3;
    for (std::size_t i = 1; i < rep.samples.size(); ++i)
        if (!(rep.samples[i].measured < rep.samples[i - 1].measured))
            sup_decreasing = false;

    bool secondary_ok = true;
    std::vector<double> ratio_devs;
    for (double tau1 : {10.0, 15.0, 20.0}) {
        const double x1 = std::pow(tau1, 0.55) * std::exp(-0.5 * tau1);
        const auto sec = secondary_frame_checks(gen.rec, matching_tau(x1));
        if (sec.verdict != Verdict::pass) secondary_ok = false;
        for (const auto& s : sec.samples)
            if (s.input == 6.0) ratio_devs.push_back(s.deviation);
    }
    double slope = 0.0;
    const Trend tr = classify_trend(ratio_devs, &slope);
    const bool ok = sup_decreasing && secondary_ok && tr != Trend::worsening;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "sup|u/u_last - 1| decreasing over x1 (%0.3f/%0.3f/%0.3f); "
                  "secondary checks pass at tau1=10,15,20, h-ratio trend %s",
                  rep.samples.size() > 0 ? rep.samples[0].measured : -1.0,
                  rep.samples.size() > 1 ? rep.samples[1].measured : -1.0,
                  rep.samples.size() > 2 ? rep.samples[2].measured : -1.0,
                  trend_name(tr));
    report(8, ok, "ratio stability and secondary-frame checks", buf);
}

// ---- criterion 9: determinism and interfaces ---------------------------

void c9_interfaces() {
    const auto dir = fresh_dir("c9");
    bool ok = true;
    std::string detail;

    RunConfig cfg;
    cfg.initial_family = "cylinder";
    cfg.initial_c0 = 1.0;
    cfg.solver.grid_size = 48;
    cfg.solver.domain_radius = 4.0;
    cfg.solver.outer_bc = OuterBc::neumann_zero;
    cfg.solver.pinch_threshold = 2e-4;
    cfg.solver.rescaled_domain = 16.0;
    cfg.solver.cfl_safety = 0.4;
    {
        std::ofstream out(dir / "run.cfg", std::ios::binary);
        out << cfg.serialize();
    }

    // byte-identical reruns
    if (run_cli("simulate --config " + (dir / "run.cfg").string() + " --out " +
                (dir / "r1").string()) != 0)
        ok = false;
    if (run_cli("simulate --config " + (dir / "run.cfg").string() + " --out " +
                (dir / "r2").string()) != 0)
        ok = false;
    if (!trees_identical(dir / "r1", dir / "r2")) {
        ok = false;
        detail += "rerun-differs ";
    }

    // config round trip is byte-identical
    if (RunConfig::parse(cfg.serialize()).serialize() != cfg.serialize()) {
        ok = false;
        detail += "config-roundtrip ";
    }

    // exit-code table: 2 config, 3 boundary, 4 gradient, 5 max_steps, 6 claims
    {
        std::ofstream out(dir / "bad.cfg");
        out << "foo=1\n";
    }
    if (run_cli("simulate --config " + (dir / "bad.cfg").string()) != 2) {
        ok = false;
        detail += "exit2 ";
    }

    RunConfig b3 = cfg;
    b3.initial_family = "bump";
    b3.initial_c0 = 2.0;
    b3.initial_c2 = -38.0;
    b3.initial_bump_scale = 0.22;
    b3.solver.domain_radius = 1.0;
    b3.solver.grid_size = 96;
    {
        std::ofstream out(dir / "b3.cfg", std::ios::binary);
        out << b3.serialize();
    }
    if (run_cli("simulate --config " + (dir / "b3.cfg").string() + " --out " +
                (dir / "o3").string()) != 3) {
        ok = false;
        detail += "exit3 ";
    }

    RunConfig b4 = cfg;
    b4.initial_family = "bump";
    b4.initial_c0 = 0.5;
    b4.initial_c2 = 60.0;
    b4.initial_bump_scale = 5.0;
    b4.solver.domain_radius = 4.0;
    {
        std::ofstream out(dir / "b4.cfg", std::ios::binary);
        out << b4.serialize();
    }
    if (run_cli("simulate --config " + (dir / "b4.cfg").string() + " --out " +
                (dir / "o4").string()) != 4) {
        ok = false;
        detail += "exit4 ";
    }

    RunConfig b5 = cfg;
    b5.initial_family = "bump";
    b5.initial_c0 = 1.2727922061357857;
    b5.initial_c2 = 1.0;
    b5.initial_bump_scale = 5.0;
    b5.solver.domain_radius = 20.0;
    b5.solver.outer_bc = OuterBc::dirichlet;
    b5.solver.max_steps = 200;
    {
        std::ofstream out(dir / "b5.cfg", std::ios::binary);
        out << b5.serialize();
    }
    if (run_cli("simulate --config " + (dir / "b5.cfg").string() + " --out " +
                (dir / "o5").string()) != 5) {
        ok = false;
        detail += "exit5 ";
    }

    // a run drifting away from the final-profile law fails verify with 6
    {
        RunRecord rec;
        rec.geometry = cfg.geometry;
        rec.status = RunStatus::pinched;
        rec.config_hash = cfg.hash();
        rec.t_star = 0.5;
        rec.t_star_uncertainty = 0.0;
        GridProfile fin;
        fin.frame = Frame::unscaled;
        fin.timestamp = rec.t_star - 1e-12;
        fin.radii = make_uniform_grid(0.4, 4001);
        fin.values.resize(fin.radii.size());
        for (std::size_t i = 1; i < fin.size(); ++i) {
            const double x = fin.radii[i];
            fin.values[i] = x / std::sqrt(-std::log(x)) *
                            (1.0 + 0.2 * std::sqrt(-std::log(x)));
        }
        fin.values[0] = 1e-15;
        rec.snapshots.push_back(fin);
        rec.snapshot_meta.push_back(
            {fin.timestamp, std::numeric_limits<double>::quiet_NaN()});
        rec.min_radius_series.push_back({fin.timestamp, 1e-15, 0.0});
        write_run(dir / "drift", cfg, rec);
    }
    if (run_cli("verify " + (dir / "drift").string() + " --claims final_profile") != 6) {
        ok = false;
        detail += "exit6 ";
    }

    if (detail.empty()) detail = "reruns identical, round trip exact, exit codes 2-6";
    report(9, ok, "determinism and interfaces", detail);
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <pinchflow binary>\n");
        return 2;
    }
    g_cli = argv[1];

    c1_exact_cylinder();
    c2_fixed_point();
    c3_convergence();
    c4_frames();
    c5_matching();
    const GenericRun gen = run_generic();
    c6_profile_trends(gen);
    c7_final_profile(gen);
    c8_stability_and_secondary(gen);
    c9_interfaces();

    std::printf("%s\n", g_all_pass ? "acceptance: all criteria passed"
                                   : "acceptance: FAILURES present");
    return g_all_pass ? 0 : 1;
}
