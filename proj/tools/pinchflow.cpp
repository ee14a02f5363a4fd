#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pinchflow/harness.hpp"
#include "pinchflow/kernels/kernels.hpp"

using namespace pinchflow;

namespace {

// Exit codes: 0 ok, 1 internal error, 2 configuration/usage error,
// 3 boundary_contaminated, 4 gradient_blowup, 5 max_steps, 6 claim failure.

std::string resolve_out(const std::string& flag_out, const RunConfig& cfg) {
    if (const char* env = std::getenv("PINCHFLOW_OUT")) {
        if (*env) return env;
    }
    if (!flag_out.empty()) return flag_out;
    return cfg.output_dir;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pinchflow: rotationally symmetric mean curvature flow near a "
                 "pinch, with rescaled-profile analysis and asymptotics checks"};
    app.require_subcommand(1);

    std::string config_path, out_flag, run_dir, claims_flag, grid_flag;
    int jobs = 2;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto* sim = app.add_subcommand("simulate", "integrate a flow until it pinches");
    sim->add_option("--config", config_path, "config file")->required();
    sim->add_option("--out", out_flag, "output run directory (PINCHFLOW_OUT overrides)");
    sim->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_given = true; });

    auto* ana = app.add_subcommand("analyze", "fit rescaled snapshots of a run");
    ana->add_option("run_dir", run_dir, "run directory")->required();

    auto* ver = app.add_subcommand("verify", "check the asymptotic claims on a run");
    ver->add_option("run_dir", run_dir, "run directory")->required();
    ver->add_option("--claims", claims_flag,
                    "comma-separated subset (default: all claims)");

    auto* swp = app.add_subcommand("sweep", "run a parameter grid of simulations");
    swp->add_option("--config", config_path, "template config file")->required();
    swp->add_option("--grid", grid_flag, "grid, e.g. \"initial.c2=0.5,1;seed=1,2\"")
        ->required();
    swp->add_option("--out", out_flag, "sweep output directory (PINCHFLOW_OUT overrides)");
    swp->add_option("--jobs", jobs, "worker threads");
    swp->add_option("--seed", seed, "override the template seed")
        ->each([&](const std::string&) { seed_given = true; });

    auto* plt = app.add_subcommand("plot", "emit gnuplot scripts for a run");
    plt->add_option("run_dir", run_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) {
            RunConfig cfg = RunConfig::load(config_path);
            if (seed_given) cfg.seed = seed;
            const auto out = resolve_out(out_flag, cfg);
            const auto res = simulate_to_dir(cfg, out);
            std::printf("status: %s\n", run_status_name(res.record.status));
            if (std::isfinite(res.record.t_star))
                std::printf("t_star: %.17g +- %.3g\n", res.record.t_star,
                            res.record.t_star_uncertainty);
            std::printf("steps: %ld\nsnapshots: %zu\nkernels: %s\nrun dir: %s\n",
                        res.record.total_steps, res.record.snapshots.size(),
                        kern::kernels().name, out.c_str());
            return res.exit_code;
        }
        if (ana->parsed()) {
            const auto rows = analyze_run_dir(run_dir);
            std::printf("fit rows: %zu (tau %.4g .. %.4g)\n", rows.size(),
                        rows.front().tau, rows.back().tau);
            std::printf("wrote series/fit_series.csv, series/final_ratio.csv\n");
            return 0;
        }
        if (ver->parsed()) {
            const auto claims = split_csv(claims_flag);
            const auto outcome = verify_run_dir(run_dir, claims);
            std::printf("%-19s %-13s %-11s %s\n", "claim", "verdict", "trend",
                        "samples");
            for (const auto& rep : outcome.reports)
                std::printf("%-19s %-13s %-11s %zu\n", rep.claim.c_str(),
                            verdict_name(rep.verdict), trend_name(rep.trend),
                            rep.samples.size());
            if (outcome.any_inconclusive)
                std::fprintf(stderr, "warning: inconclusive claims (unresolved "
                                     "windows); see reports/\n");
            return outcome.any_fail ? 6 : 0;
        }
        if (swp->parsed()) {
            RunConfig tmpl = RunConfig::load(config_path);
            if (seed_given) tmpl.seed = seed;
            const auto spec = parse_sweep_grid(grid_flag);
            const auto out = resolve_out(out_flag, tmpl);
            const auto res = sweep_run(tmpl, spec, jobs, out);
            for (const auto& c : res.cells)
                std::printf("%s: %s\n", c.dir.c_str(), c.status.c_str());
            std::printf("sweep manifest: %s/sweep_manifest.json\n", out.c_str());
            return res.exit_code;
        }
        if (plt->parsed()) {
            const auto scripts = emit_plot_scripts(run_dir);
            for (const auto& s : scripts) std::printf("plots/%s\n", s.c_str());
            return 0;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
