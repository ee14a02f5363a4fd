#include "pinchflow/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pinchflow/frames.hpp"
#include "pinchflow/profile_fit.hpp"

namespace pinchflow {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(RunStatus s) {
    switch (s) {
    case RunStatus::pinched: return 0;
    case RunStatus::boundary_contaminated: return 3;
    case RunStatus::gradient_blowup: return 4;
    case RunStatus::max_steps: return 5;
    }
    return 1;
}

SimulateResult simulate_to_dir(const RunConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    SimulateResult res;
    res.record = run_to_pinch(cfg.solver, cfg.geometry, cfg.make_initial());
    res.record.config_hash = cfg.hash();
    write_run(out_dir, cfg, res.record);
    res.exit_code = exit_code_for(res.record.status);
    return res;
}

std::vector<FitRow> analyze_run_dir(const fs::path& dir) {
    const LoadedRun run = load_run(dir);
    const auto& rec = run.record;

    std::vector<FitRow> rows;
    for (const auto& snap : rec.snapshots) {
        if (snap.frame != Frame::rescaled) continue;
        ProfileFit fit;
        try {
            fit = fit_profile(snap, run.config.window);
        } catch (const DomainError&) {
            continue; // window too small at this tau
        }
        rows.push_back({fit.tau, fit.a, fit.b, fit.window, fit.residual_l2,
                        fit.norms.at("w3_eta"), fit.norms.at("w2_grad"),
                        fit.norms.at("w1_hess")});
    }
    if (rows.empty())
        throw IoError("analyze: no fittable rescaled snapshots in " + dir.string());
    write_fit_series(dir, rows);

    // final-profile ratio series over the frozen range
    std::vector<RatioRow> ratio_rows;
    if (rec.status == RunStatus::pinched && std::isfinite(rec.t_star)) {
        const RunSampler sam(rec);
        const double tau_f = sam.final_tau();
        const double x_lo = 3.0 * std::pow(tau_f, 0.55) * std::exp(-0.5 * tau_f);
        const double x_hi = 0.3;
        if (x_lo < x_hi) {
            const int n = 25;
            for (int i = 0; i < n; ++i) {
                const double x =
                    x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / (n - 1));
                if (!(x < 1.0)) continue;
                double tau_used = 0.0;
                const auto u = sam.u_final(x, &tau_used);
                if (!u) continue;
                const double ratio = *u * std::sqrt(-std::log(x)) / x;
                ratio_rows.push_back({x, *u, ratio, tau_used});
            }
        }
    }
    write_final_ratio(dir, ratio_rows);
    return rows;
}

const std::vector<std::string> kAllClaims = {
    "log_relation", "u_at_t1", "final_profile", "ratio_stability",
    "secondary_frame"};

namespace {

std::vector<double> radii_for_tau1(std::initializer_list<double> tau1s) {
    std::vector<double> xs;
    for (double t1 : tau1s) xs.push_back(std::pow(t1, 0.55) * std::exp(-0.5 * t1));
    return xs;
}

VerificationReport combined_secondary(const RunRecord& rec) {
    VerificationReport rep;
    rep.claim = "secondary_frame";
    std::vector<double> ratio_devs;
    bool all_pass = true;
    bool any = false;
    for (double tau1 : {10.0, 15.0, 20.0}) {
        const double x1 = std::pow(tau1, 0.55) * std::exp(-0.5 * tau1);
        VerificationReport sub;
        try {
            sub = secondary_frame_checks(rec, matching_tau(x1));
        } catch (const DomainError& e) {
            rep.notes.push_back("tau1 = " + std::to_string(tau1) + ": " + e.what());
            all_pass = false;
            continue;
        }
        for (const auto& s : sub.samples) {
            // encode (tau1, check id) in the input slot
            rep.samples.push_back({tau1 + s.input / 10.0, s.measured, s.target,
                                   s.deviation});
            if (s.input == 6.0) ratio_devs.push_back(s.deviation);
        }
        for (const auto& n : sub.notes) rep.notes.push_back(n);
        for (const auto& [k, v] : sub.tolerances)
            rep.tolerances[k + "_tau" + std::to_string(static_cast<int>(tau1))] = v;
        if (sub.verdict == Verdict::fail) all_pass = false;
        if (sub.verdict == Verdict::inconclusive) {
            rep.notes.push_back("tau1 = " + std::to_string(tau1) + ": inconclusive");
        } else {
            any = true;
        }
    }
    if (!any) {
        rep.verdict = Verdict::inconclusive;
        return rep;
    }
    rep.notes.push_back("measured tau1 range: 10..20 (desk-scale cap)");
    rep.trend = classify_trend(ratio_devs, &rep.trend_slope);
    if (!all_pass)
        rep.verdict = Verdict::fail;
    else if (rep.trend == Trend::worsening)
        rep.verdict = Verdict::trend_pass; // checks pass; ratio trend noted
    else
        rep.verdict = Verdict::pass;
    return rep;
}

} // namespace

VerifyOutcome verify_run_dir(const fs::path& dir, const std::vector<std::string>& claims) {
    const LoadedRun run = load_run(dir);
    const auto& rec = run.record;

    std::vector<std::string> wanted = claims.empty() ? kAllClaims : claims;
    for (const auto& c : wanted)
        if (std::find(kAllClaims.begin(), kAllClaims.end(), c) == kAllClaims.end())
            throw ConfigError("unknown claim: " + c);

    VerifyOutcome out;
    for (const auto& claim : wanted) {
        VerificationReport rep;
        if (claim == "log_relation") {
            const double pts[] = {1e-4, 1e-8, 1e-16, 1e-32};
            rep = verify_log_relation(pts);
        } else if (claim == "u_at_t1") {
            const auto xs = radii_for_tau1({10.0, 15.0, 20.0});
            rep = verify_u_at_t1(rec, xs);
        } else if (claim == "final_profile") {
            std::vector<double> xs;
            for (int i = 0; i < 8; ++i)
                xs.push_back(std::pow(10.0, -1.0 - 1.5 * i / 7.0));
            rep = verify_final_profile(rec, xs);
        } else if (claim == "ratio_stability") {
            const double pts[] = {0.05, 0.02, 0.008};
            rep = verify_ratio_stability(rec, pts, 0.2);
        } else if (claim == "secondary_frame") {
            rep = combined_secondary(rec);
        }
        if (rep.verdict == Verdict::fail) out.any_fail = true;
        if (rep.verdict == Verdict::inconclusive) out.any_inconclusive = true;
        out.reports.push_back(std::move(rep));
    }
    write_reports(dir, out.reports);
    return out;
}

std::vector<std::string> emit_plot_scripts(const fs::path& dir) {
    if (!fs::exists(dir / "series" / "fit_series.csv") ||
        !fs::exists(dir / "series" / "final_ratio.csv"))
        throw IoError("plot: missing analysis series in " + dir.string() +
                      " (run analyze first)");
    json manifest;
    {
        std::ifstream in(dir / "manifest.json");
        if (!in) throw IoError("plot: missing manifest in " + dir.string());
        in >> manifest;
    }
    fs::create_directories(dir / "plots");

    auto write_script = [&](const std::string& name, const std::string& body) {
        std::ofstream out(dir / "plots" / name, std::ios::binary);
        out << body;
    };

    {
        std::ostringstream os;
        os << "# Radius profiles across the run (relative paths; run from the"
              " run directory)\n"
           << "set datafile separator \",\"\n"
           << "set xlabel \"radius\"\nset ylabel \"profile value\"\n"
           << "set key top left\nplot \\\n";
        const auto& snaps = manifest.at("snapshots");
        const std::size_t n = snaps.size();
        const std::size_t stride = std::max<std::size_t>(1, n / 8);
        bool first = true;
        for (std::size_t j = 0; j < n; j += stride) {
            if (!first) os << ", \\\n";
            first = false;
            os << "  \"" << snaps[j].at("file").get<std::string>()
               << "\" using 1:2 with lines title \""
               << snaps[j].at("frame").get<std::string>() << " t="
               << snaps[j].at("timestamp").get<double>() << "\"";
        }
        os << "\npause -1\n";
        write_script("profile_evolution.gp", os.str());
    }
    write_script("a_tau.gp",
                 "set datafile separator \",\"\n"
                 "set xlabel \"tau\"\nset ylabel \"a(tau)\"\n"
                 "plot \"series/fit_series.csv\" skip 1 using 1:2 with linespoints "
                 "title \"a(tau)\", 0.5 with lines title \"1/2\"\npause -1\n");
    write_script("b_tau.gp",
                 "set datafile separator \",\"\n"
                 "set xlabel \"tau\"\nset ylabel \"tau * b(tau)\"\n"
                 "plot \"series/fit_series.csv\" skip 1 using 1:($1*$3) with "
                 "linespoints title \"tau b\", 1 with lines title \"1\"\npause -1\n");
    write_script("eta_norms.gp",
                 "set datafile separator \",\"\n"
                 "set xlabel \"tau\"\nset ylabel \"tau^2 * weighted norms\"\n"
                 "set logscale y\n"
                 "plot \"series/fit_series.csv\" skip 1 using 1:($1*$1*$6) with "
                 "linespoints title \"tau^2 |<y>^-3 eta|\", \\\n"
                 "     \"series/fit_series.csv\" skip 1 using 1:($1*$1*$7) with "
                 "linespoints title \"tau^2 |<y>^-2 grad eta|\"\npause -1\n");
    write_script("final_ratio.gp",
                 "set datafile separator \",\"\n"
                 "set xlabel \"|x|\"\nset ylabel \"u(x) sqrt(-ln|x|)/|x|\"\n"
                 "set logscale x\n"
                 "plot \"series/final_ratio.csv\" skip 1 using 1:3 with linespoints "
                 "title \"R(x)\", 1 with lines title \"1\"\npause -1\n");

    return {"profile_evolution.gp", "a_tau.gp", "b_tau.gp", "eta_norms.gp",
            "final_ratio.gp"};
}

SweepSpec parse_sweep_grid(const std::string& text) {
    SweepSpec spec;
    std::istringstream is(text);
    std::string axis;
    while (std::getline(is, axis, ';')) {
        if (axis.empty()) continue;
        const auto eq = axis.find('=');
        if (eq == std::string::npos)
            throw ConfigError("sweep grid: expected key=v1,v2 in '" + axis + "'");
        const std::string key = axis.substr(0, eq);
        std::vector<std::string> values;
        std::istringstream vs(axis.substr(eq + 1));
        std::string v;
        while (std::getline(vs, v, ',')) values.push_back(v);
        if (values.empty())
            throw ConfigError("sweep grid: axis '" + key + "' has no values");
        spec.axes.emplace_back(key, values);
    }
    if (spec.axes.empty()) throw ConfigError("sweep grid: empty grid");
    return spec;
}

namespace {

RunConfig apply_overrides(const RunConfig& tmpl,
                          const std::vector<std::pair<std::string, std::string>>& ovr) {
    std::istringstream is(tmpl.serialize());
    std::ostringstream os;
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        const std::string key = line.substr(0, eq);
        bool replaced = false;
        for (const auto& [k, v] : ovr) {
            if (k == key) {
                os << k << "=" << v << "\n";
                replaced = true;
                break;
            }
        }
        if (!replaced) os << line << "\n";
    }
    return RunConfig::parse(os.str());
}

} // namespace

SweepResult sweep_run(const RunConfig& tmpl, const SweepSpec& spec, int jobs,
                      const fs::path& out_dir) {
    // template keys must exist so every override lands on a real key
    for (const auto& [key, values] : spec.axes) {
        (void)values;
        if (tmpl.serialize().find(key + "=") == std::string::npos)
            throw ConfigError("sweep grid: unknown config key '" + key + "'");
    }

    // cartesian product in declaration order, deduplicated
    std::vector<std::vector<std::pair<std::string, std::string>>> cells;
    cells.emplace_back();
    for (const auto& [key, values] : spec.axes) {
        std::vector<std::vector<std::pair<std::string, std::string>>> next;
        for (const auto& cell : cells)
            for (const auto& v : values) {
                auto c = cell;
                c.emplace_back(key, v);
                next.push_back(std::move(c));
            }
        cells = std::move(next);
    }
    std::set<std::string> seen;
    std::vector<std::vector<std::pair<std::string, std::string>>> unique_cells;
    for (auto& c : cells) {
        std::string sig;
        for (const auto& [k, v] : c) sig += k + "=" + v + ";";
        if (seen.insert(sig).second) unique_cells.push_back(std::move(c));
    }

    SweepResult result;
    result.cells.resize(unique_cells.size());
    fs::create_directories(out_dir);

    std::atomic<std::size_t> cursor{0};
    std::mutex io_mutex;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= unique_cells.size()) return;
            char name[32];
            std::snprintf(name, sizeof(name), "cell_%03zu", i);
            SweepCell cell;
            cell.dir = name;
            cell.overrides = unique_cells[i];
            try {
                const RunConfig cfg = apply_overrides(tmpl, unique_cells[i]);
                const auto res = simulate_to_dir(cfg, out_dir / name);
                cell.status = run_status_name(res.record.status);
                cell.exit_code = res.exit_code;
            } catch (const std::exception& e) {
                cell.status = std::string("error: ") + e.what();
                cell.exit_code = 1;
            }
            std::lock_guard<std::mutex> lock(io_mutex);
            result.cells[i] = std::move(cell);
        }
    };

    const int nw = std::max(1, std::min<int>(jobs, static_cast<int>(unique_cells.size())));
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    json m;
    json jcells = json::array();
    for (const auto& c : result.cells) {
        json jc;
        jc["dir"] = c.dir;
        json ovr;
        for (const auto& [k, v] : c.overrides) ovr[k] = v;
        jc["overrides"] = ovr;
        jc["status"] = c.status;
        jc["exit_code"] = c.exit_code;
        jcells.push_back(jc);
        result.exit_code = std::max(result.exit_code, c.exit_code);
    }
    m["cells"] = jcells;
    std::ofstream out(out_dir / "sweep_manifest.json", std::ios::binary);
    out << m.dump(2) << "\n";
    return result;
}

} // namespace pinchflow
