#include "pinchflow/config.hpp"

#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "pinchflow/grid.hpp"

namespace pinchflow {

namespace {

std::string fmt_double(double x) {
    if (std::isnan(x)) return "auto";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

[[noreturn]] void parse_fail(int line, int col, const std::string& what) {
    throw ConfigError("line " + std::to_string(line) + ", col " +
                      std::to_string(col) + ": " + what);
}

double parse_double(const std::string& key, const std::string& v, int line, int col) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        parse_fail(line, col, "key '" + key + "': not a number: '" + v + "'");
    return x;
}

long parse_long(const std::string& key, const std::string& v, int line, int col) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        parse_fail(line, col, "key '" + key + "': not an integer: '" + v + "'");
    return x;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

void RunConfig::validate() const {
    geometry.validate();
    solver.validate();
    window.validate();
    if (initial_family != "bump" && initial_family != "cylinder")
        throw ConfigError("initial.family: unknown family '" + initial_family + "'");
    if (!(initial_c0 > 0.0)) throw ConfigError("initial.c0 must be > 0");
    if (initial_family == "bump") {
        // c2 < 0 (a dip toward the outer edge) is allowed; positivity of the
        // resulting profile is checked when it is built
        if (!std::isfinite(initial_c2)) throw ConfigError("initial.c2 must be finite");
        if (!(initial_bump_scale > 0.0))
            throw ConfigError("initial.bump_scale must be > 0");
    }
    if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

std::string RunConfig::serialize() const {
    std::ostringstream os;
    os << "geometry.axis_dim=" << geometry.axis_dim << "\n";
    os << "geometry.fiber_dim=" << geometry.fiber_dim << "\n";
    os << "initial.family=" << initial_family << "\n";
    os << "initial.c0=" << fmt_double(initial_c0) << "\n";
    os << "initial.c2=" << fmt_double(initial_c2) << "\n";
    os << "initial.bump_scale=" << fmt_double(initial_bump_scale) << "\n";
    os << "solver.grid_size=" << solver.grid_size << "\n";
    os << "solver.domain_radius=" << fmt_double(solver.domain_radius) << "\n";
    os << "solver.outer_bc="
       << (solver.outer_bc == OuterBc::dirichlet ? "dirichlet" : "neumann_zero") << "\n";
    os << "solver.outer_bc_value=" << fmt_double(solver.outer_bc_value) << "\n";
    os << "solver.cfl_safety=" << fmt_double(solver.cfl_safety) << "\n";
    os << "solver.dt_min=" << fmt_double(solver.dt_min) << "\n";
    os << "solver.dt_max=" << fmt_double(solver.dt_max) << "\n";
    os << "solver.pinch_threshold=" << fmt_double(solver.pinch_threshold) << "\n";
    os << "solver.gradient_abort=" << fmt_double(solver.gradient_abort) << "\n";
    if (solver.refinement_levels == 0)
        os << "solver.refinement=none\n";
    else
        os << "solver.refinement=dyadic:" << solver.refinement_levels << "\n";
    os << "solver.max_steps=" << solver.max_steps << "\n";
    os << "solver.rescaled_domain=" << fmt_double(solver.rescaled_domain) << "\n";
    os << "solver.switch_ratio=" << fmt_double(solver.switch_ratio) << "\n";
    os << "solver.snapshot_dtau=" << fmt_double(solver.snapshot_dtau) << "\n";
    os << "window.xi0=" << fmt_double(window.xi0) << "\n";
    os << "window.multiplier=" << fmt_double(window.multiplier) << "\n";
    os << "output.dir=" << output_dir << "\n";
    os << "seed=" << seed << "\n";
    return os.str();
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, bool> seen;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        if (const auto pos = s.find('#'); pos != std::string::npos) s.resize(pos);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) parse_fail(line, 1, "expected key=value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        const int vcol = static_cast<int>(eq) + 2;
        if (seen.count(key)) parse_fail(line, 1, "duplicate key '" + key + "'");
        seen[key] = true;

        if (key == "geometry.axis_dim") {
            cfg.geometry.axis_dim = static_cast<int>(parse_long(key, val, line, vcol));
        } else if (key == "geometry.fiber_dim") {
            cfg.geometry.fiber_dim = static_cast<int>(parse_long(key, val, line, vcol));
        } else if (key == "initial.family") {
            cfg.initial_family = val;
        } else if (key == "initial.c0") {
            cfg.initial_c0 = parse_double(key, val, line, vcol);
        } else if (key == "initial.c2") {
            cfg.initial_c2 = parse_double(key, val, line, vcol);
        } else if (key == "initial.bump_scale") {
            cfg.initial_bump_scale = parse_double(key, val, line, vcol);
        } else if (key == "solver.grid_size") {
            cfg.solver.grid_size = static_cast<int>(parse_long(key, val, line, vcol));
        } else if (key == "solver.domain_radius") {
            cfg.solver.domain_radius = parse_double(key, val, line, vcol);
        } else if (key == "solver.outer_bc") {
            if (val == "dirichlet")
                cfg.solver.outer_bc = OuterBc::dirichlet;
            else if (val == "neumann_zero")
                cfg.solver.outer_bc = OuterBc::neumann_zero;
            else
                parse_fail(line, vcol, "solver.outer_bc: unknown value '" + val + "'");
        } else if (key == "solver.outer_bc_value") {
            cfg.solver.outer_bc_value =
                (val == "auto") ? std::numeric_limits<double>::quiet_NaN()
                                : parse_double(key, val, line, vcol);
        } else if (key == "solver.cfl_safety") {
            cfg.solver.cfl_safety = parse_double(key, val, line, vcol);
        } else if (key == "solver.dt_min") {
            cfg.solver.dt_min = parse_double(key, val, line, vcol);
        } else if (key == "solver.dt_max") {
            cfg.solver.dt_max = parse_double(key, val, line, vcol);
        } else if (key == "solver.pinch_threshold") {
            cfg.solver.pinch_threshold = parse_double(key, val, line, vcol);
        } else if (key == "solver.gradient_abort") {
            cfg.solver.gradient_abort = parse_double(key, val, line, vcol);
        } else if (key == "solver.refinement") {
            if (val == "none") {
                cfg.solver.refinement_levels = 0;
            } else if (val.rfind("dyadic:", 0) == 0) {
                cfg.solver.refinement_levels =
                    static_cast<int>(parse_long(key, val.substr(7), line, vcol + 7));
            } else {
                parse_fail(line, vcol, "solver.refinement: unknown value '" + val + "'");
            }
        } else if (key == "solver.max_steps") {
            cfg.solver.max_steps = parse_long(key, val, line, vcol);
        } else if (key == "solver.rescaled_domain") {
            cfg.solver.rescaled_domain = parse_double(key, val, line, vcol);
        } else if (key == "solver.switch_ratio") {
            cfg.solver.switch_ratio = parse_double(key, val, line, vcol);
        } else if (key == "solver.snapshot_dtau") {
            cfg.solver.snapshot_dtau = parse_double(key, val, line, vcol);
        } else if (key == "window.xi0") {
            cfg.window.xi0 = parse_double(key, val, line, vcol);
        } else if (key == "window.multiplier") {
            cfg.window.multiplier = parse_double(key, val, line, vcol);
        } else if (key == "output.dir") {
            cfg.output_dir = val;
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(
                std::strtoull(val.c_str(), nullptr, 10));
        } else {
            parse_fail(line, 1, "unknown key '" + key + "'");
        }
    }
    try {
        cfg.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("validation: ") + e.what());
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string RunConfig::hash() const {
    const std::string text = serialize();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

GridProfile RunConfig::make_initial() const {
    validate();
    GridProfile p;
    p.frame = Frame::unscaled;
    p.timestamp = 0.0;
    p.radii = make_refined_grid(solver.domain_radius, solver.grid_size,
                                solver.refinement_levels);
    p.values.resize(p.radii.size());
    for (std::size_t i = 0; i < p.radii.size(); ++i) {
        const double r = p.radii[i];
        if (initial_family == "cylinder") {
            p.values[i] = initial_c0;
        } else {
            const double r2 = r * r;
            p.values[i] =
                initial_c0 +
                initial_c2 * r2 / (1.0 + r2 / (initial_bump_scale * initial_bump_scale));
        }
    }
    p.validate();
    return p;
}

} // namespace pinchflow
