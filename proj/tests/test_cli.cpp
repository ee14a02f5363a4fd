#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pinchflow/config.hpp"
#include "pinchflow/grid.hpp"
#include "pinchflow/run_io.hpp"

using namespace pinchflow;
namespace fs = std::filesystem;

static std::string g_cli; // path to the pinchflow binary, last argv entry

namespace {

int run_cli(const std::string& args, std::string* out = nullptr) {
    const auto tmp = fs::temp_directory_path() / "pinchflow_cli_out.txt";
    const std::string cmd = g_cli + " " + args + " >" + tmp.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    if (out) {
        std::ifstream in(tmp);
        std::ostringstream ss;
        ss << in.rdbuf();
        *out = ss.str();
    }
    return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("pinchflow_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// quick-pinching cylinder run, a few seconds at most
RunConfig fast_config() {
    RunConfig cfg;
    cfg.initial_family = "cylinder";
    cfg.initial_c0 = 1.0;
    cfg.solver.grid_size = 48;
    cfg.solver.domain_radius = 4.0;
    cfg.solver.outer_bc = OuterBc::neumann_zero;
    cfg.solver.pinch_threshold = 2e-4;
    cfg.solver.rescaled_domain = 16.0;
    cfg.solver.cfl_safety = 0.4;
    return cfg;
}

void write_config(const fs::path& file, const RunConfig& cfg) {
    std::ofstream out(file, std::ios::binary);
    out << cfg.serialize();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool trees_identical(const fs::path& a, const fs::path& b) {
    std::vector<fs::path> rel_a, rel_b;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) rel_a.push_back(fs::relative(e.path(), a));
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) rel_b.push_back(fs::relative(e.path(), b));
    std::sort(rel_a.begin(), rel_a.end());
    std::sort(rel_b.begin(), rel_b.end());
    if (rel_a != rel_b) return false;
    for (const auto& r : rel_a)
        if (slurp(a / r) != slurp(b / r)) return false;
    return true;
}

} // namespace

TEST_CASE("simulate: exit 0, manifest written, reruns byte-identical") {
    const auto dir = fresh_dir("sim");
    write_config(dir / "run.cfg", fast_config());

    const auto out1 = dir / "run1";
    const auto out2 = dir / "run2";
    CHECK(run_cli("simulate --config " + (dir / "run.cfg").string() + " --out " +
                  out1.string()) == 0);
    CHECK(fs::exists(out1 / "manifest.json"));
    CHECK(run_cli("simulate --config " + (dir / "run.cfg").string() + " --out " +
                  out2.string()) == 0);
    CHECK(trees_identical(out1, out2));

    const auto run = load_run(out1);
    CHECK(run.record.status == RunStatus::pinched);
    CHECK(run.record.degenerate_pinch);
}

TEST_CASE("scalar and SIMD backends produce byte-identical run directories") {
    const auto dir = fresh_dir("backends");
    write_config(dir / "run.cfg", fast_config());
    setenv("PINCHFLOW_KERNELS", "scalar", 1);
    const int rc1 = run_cli("simulate --config " + (dir / "run.cfg").string() +
                            " --out " + (dir / "scalar").string());
    setenv("PINCHFLOW_KERNELS", "avx2", 1);
    const int rc2 = run_cli("simulate --config " + (dir / "run.cfg").string() +
                            " --out " + (dir / "simd").string());
    unsetenv("PINCHFLOW_KERNELS");
    CHECK(rc1 == 0);
    CHECK(rc2 == 0);
    CHECK(trees_identical(dir / "scalar", dir / "simd"));
}

TEST_CASE("PINCHFLOW_OUT overrides --out") {
    const auto dir = fresh_dir("env");
    write_config(dir / "run.cfg", fast_config());
    const auto envdir = dir / "env_out";
    setenv("PINCHFLOW_OUT", envdir.string().c_str(), 1);
    CHECK(run_cli("simulate --config " + (dir / "run.cfg").string() + " --out " +
                  (dir / "flag_out").string()) == 0);
    unsetenv("PINCHFLOW_OUT");
    CHECK(fs::exists(envdir / "manifest.json"));
    CHECK_FALSE(fs::exists(dir / "flag_out"));
}

TEST_CASE("config errors exit 2") {
    const auto dir = fresh_dir("badcfg");
    {
        std::ofstream out(dir / "bad.cfg");
        out << "foo=1\n";
    }
    std::string outp;
    CHECK(run_cli("simulate --config " + (dir / "bad.cfg").string(), &outp) == 2);
    CHECK(outp.find("foo") != std::string::npos);
    CHECK(run_cli("simulate --config " + (dir / "missing.cfg").string()) == 2);
    CHECK(run_cli("simulate") == 2);            // missing required flag
    CHECK(run_cli("no_such_command") == 2);     // unknown subcommand
}

TEST_CASE("boundary contamination exits 3 (edge-pinching plateau, tiny domain)") {
    const auto dir = fresh_dir("bdry");
    RunConfig cfg = fast_config();
    cfg.initial_family = "bump";
    cfg.initial_c0 = 2.0;
    cfg.initial_c2 = -38.0; // wide low plateau reaching the outer edge
    cfg.initial_bump_scale = 0.22;
    cfg.solver.domain_radius = 1.0;
    cfg.solver.grid_size = 96;
    cfg.solver.outer_bc = OuterBc::neumann_zero;
    write_config(dir / "run.cfg", cfg);
    CHECK(run_cli("simulate --config " + (dir / "run.cfg").string() + " --out " +
                  (dir / "out").string()) == 3);
}

TEST_CASE("gradient blow-up exits 4") {
    const auto dir = fresh_dir("grad");
    RunConfig cfg = fast_config();
    cfg.initial_family = "bump";
    cfg.initial_c0 = 0.5;
    cfg.initial_c2 = 60.0; // steeper than gradient_abort from the start
    cfg.initial_bump_scale = 5.0;
    cfg.solver.domain_radius = 4.0;
    cfg.solver.gradient_abort = 50.0;
    write_config(dir / "run.cfg", cfg);
    CHECK(run_cli("simulate --config " + (dir / "run.cfg").string() + " --out " +
                  (dir / "out").string()) == 4);
}

TEST_CASE("max_steps exits 5") {
    const auto dir = fresh_dir("maxs");
    RunConfig cfg = fast_config();
    cfg.initial_c0 = 2.5;
    cfg.solver.outer_bc = OuterBc::dirichlet;
    cfg.solver.max_steps = 200;
    write_config(dir / "run.cfg", cfg);
    CHECK(run_cli("simulate --config " + (dir / "run.cfg").string() + " --out " +
                  (dir / "out").string()) == 5);
}

TEST_CASE("analyze + verify + plot pipeline on a fast run") {
    const auto dir = fresh_dir("pipe");
    write_config(dir / "run.cfg", fast_config());
    const auto out = dir / "out";
    REQUIRE(run_cli("simulate --config " + (dir / "run.cfg").string() + " --out " +
                    out.string()) == 0);

    // plot before analyze: missing series
    CHECK(run_cli("plot " + out.string()) == 2);

    CHECK(run_cli("analyze " + out.string()) == 0);
    CHECK(fs::exists(out / "series" / "fit_series.csv"));
    CHECK(fs::exists(out / "series" / "final_ratio.csv"));

    // degenerate cylinder run: claims are flagged, nothing hard-fails
    std::string vout;
    CHECK(run_cli("verify " + out.string(), &vout) == 0);
    CHECK(fs::exists(out / "reports" / "summary.txt"));
    CHECK(fs::exists(out / "reports" / "log_relation.json"));

    CHECK(run_cli("verify " + out.string() + " --claims log_relation") == 0);
    CHECK(run_cli("verify " + out.string() + " --claims nonsense") == 2);

    CHECK(run_cli("plot " + out.string()) == 0);
    for (const char* name : {"profile_evolution.gp", "a_tau.gp", "b_tau.gp",
                             "eta_norms.gp", "final_ratio.gp"}) {
        CHECK(fs::exists(out / "plots" / name));
        // scripts reference only relative paths
        const std::string body = slurp(out / "plots" / name);
        CHECK(body.find(out.string()) == std::string::npos);
        CHECK(body.find("\"/") == std::string::npos);
    }

    // analyze of an empty dir fails cleanly
    CHECK(run_cli("analyze " + (dir / "nothing").string()) == 2);
}

TEST_CASE("claim failure exits 6 on a run violating the final-profile law") {
    // synthetic final snapshot drifting away from x/sqrt(-ln x) toward small
    // x: deviations worsen, so the trend claim hard-fails
    const auto dir = fresh_dir("fail6");
    RunConfig cfg = fast_config();

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
        fin.values[i] = x / std::sqrt(-std::log(x)) * (1.0 + 0.2 * std::sqrt(-std::log(x)));
    }
    fin.values[0] = 1e-15;
    rec.snapshots.push_back(fin);
    rec.snapshot_meta.push_back(
        {fin.timestamp, std::numeric_limits<double>::quiet_NaN()});
    rec.min_radius_series.push_back({fin.timestamp, 1e-15, 0.0});
    write_run(dir / "out", cfg, rec);
    CHECK(run_cli("verify " + (dir / "out").string() + " --claims final_profile") == 6);
}

TEST_CASE("sweep: grid of runs, dedup, single-cell equals simulate") {
    const auto dir = fresh_dir("sweep");
    write_config(dir / "tmpl.cfg", fast_config());

    // 2x2 grid with a duplicated value -> 2 unique cells
    CHECK(run_cli("sweep --config " + (dir / "tmpl.cfg").string() +
                  " --grid \"initial.c0=1.0,1.0;seed=0,1\" --jobs 2 --out " +
                  (dir / "grid").string()) == 0);
    CHECK(fs::exists(dir / "grid" / "sweep_manifest.json"));
    CHECK(fs::exists(dir / "grid" / "cell_000" / "manifest.json"));
    CHECK(fs::exists(dir / "grid" / "cell_001" / "manifest.json"));
    CHECK_FALSE(fs::exists(dir / "grid" / "cell_002"));

    // empty grid errors
    CHECK(run_cli("sweep --config " + (dir / "tmpl.cfg").string() +
                  " --grid \"\" --out " + (dir / "g2").string()) == 2);

    // size-1 sweep cell content matches a plain simulate
    CHECK(run_cli("sweep --config " + (dir / "tmpl.cfg").string() +
                  " --grid \"seed=0\" --out " + (dir / "one").string()) == 0);
    CHECK(run_cli("simulate --config " + (dir / "tmpl.cfg").string() + " --out " +
                  (dir / "plain").string()) == 0);
    CHECK(trees_identical(dir / "one" / "cell_000", dir / "plain"));
}

int main(int argc, char** argv) {
    if (argc > 1 && argv[argc - 1][0] != '-') {
        g_cli = argv[argc - 1];
        --argc;
    }
    if (g_cli.empty()) {
        std::fprintf(stderr, "usage: test_cli [doctest args] <pinchflow binary>\n");
        return 1;
    }
    doctest::Context ctx;
    ctx.applyCommandLine(argc, argv);
    return ctx.run();
}
