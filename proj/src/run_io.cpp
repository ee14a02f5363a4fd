#include "pinchflow/run_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pinchflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << text;
    if (!out) throw IoError("write failed: " + file.string());
}

std::string read_text(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double json_double(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

json double_json(double x) {
    if (std::isnan(x)) return nullptr;
    return x;
}

} // namespace

void write_snapshot_csv(const fs::path& file, const GridProfile& p,
                        const FlowGeometry& g) {
    std::ostringstream os;
    os << "# " << frame_name(p.frame) << ", " << g17(p.timestamp) << ", "
       << g.axis_dim << ", " << g.fiber_dim << "\n";
    for (std::size_t i = 0; i < p.size(); ++i)
        os << g17(p.radii[i]) << "," << g17(p.values[i]) << "\n";
    write_text(file, os.str());
}

GridProfile read_snapshot_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read snapshot: " + file.string());
    std::string line;
    if (!std::getline(in, line) || line.size() < 2 || line[0] != '#')
        throw IoError("snapshot missing header: " + file.string());
    GridProfile p;
    {
        std::istringstream hs(line.substr(1));
        std::string frame, ts;
        std::getline(hs, frame, ',');
        std::getline(hs, ts, ',');
        // strip spaces
        frame.erase(0, frame.find_first_not_of(' '));
        frame.erase(frame.find_last_not_of(' ') + 1);
        p.frame = frame_from_name(frame);
        p.timestamp = std::strtod(ts.c_str(), nullptr);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const char* s = line.c_str();
        char* end = nullptr;
        const double r = std::strtod(s, &end);
        if (end == s || *end != ',') throw IoError("bad snapshot row: " + file.string());
        const double u = std::strtod(end + 1, nullptr);
        p.radii.push_back(r);
        p.values.push_back(u);
    }
    p.validate();
    return p;
}

void write_run(const fs::path& dir, const RunConfig& cfg, const RunRecord& rec) {
    fs::create_directories(dir / "snapshots");
    fs::create_directories(dir / "series");

    write_text(dir / "config.cfg", cfg.serialize());

    json snaps = json::array();
    for (std::size_t j = 0; j < rec.snapshots.size(); ++j) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%06zu.csv", j);
        write_snapshot_csv(dir / "snapshots" / name, rec.snapshots[j], rec.geometry);
        json meta;
        meta["file"] = std::string("snapshots/") + name;
        meta["frame"] = frame_name(rec.snapshots[j].frame);
        meta["timestamp"] = rec.snapshots[j].timestamp;
        meta["t_unscaled"] = rec.snapshot_meta[j].t_unscaled;
        meta["t_star_used"] = double_json(rec.snapshot_meta[j].t_star_used);
        snaps.push_back(meta);
    }

    {
        // min-radius series, decimated to keep run directories reviewable
        std::ostringstream os;
        os << "t,u_min,argmin_r\n";
        const std::size_t n = rec.min_radius_series.size();
        const std::size_t stride = std::max<std::size_t>(1, n / 20000);
        for (std::size_t i = 0; i < n; i += stride) {
            const auto& s = rec.min_radius_series[i];
            os << g17(s.t) << "," << g17(s.u_min) << "," << g17(s.argmin_r) << "\n";
        }
        if (n > 0 && (n - 1) % stride != 0) {
            const auto& s = rec.min_radius_series.back();
            os << g17(s.t) << "," << g17(s.u_min) << "," << g17(s.argmin_r) << "\n";
        }
        write_text(dir / "series" / "min_radius.csv", os.str());
    }

    json m;
    m["config_file"] = "config.cfg";
    m["config_hash"] = rec.config_hash;
    m["geometry"] = {{"axis_dim", rec.geometry.axis_dim},
                     {"fiber_dim", rec.geometry.fiber_dim}};
    m["status"] = run_status_name(rec.status);
    m["degenerate_pinch"] = rec.degenerate_pinch;
    m["t_star"] = {{"value", double_json(rec.t_star)},
                   {"uncertainty", double_json(rec.t_star_uncertainty)}};
    m["switch"] = {{"t", double_json(rec.switch_t)}, {"tau", double_json(rec.switch_tau)}};
    m["total_steps"] = rec.total_steps;
    m["snapshots"] = snaps;
    m["series"] = {{"min_radius", "series/min_radius.csv"}};
    write_text(dir / "manifest.json", m.dump(2) + "\n");
}

LoadedRun load_run(const fs::path& dir) {
    LoadedRun lr;
    lr.config = RunConfig::load(dir / "config.cfg");

    json m;
    try {
        m = json::parse(read_text(dir / "manifest.json"));
    } catch (const json::exception& e) {
        throw IoError("bad manifest in " + dir.string() + ": " + e.what());
    }
    RunRecord& rec = lr.record;
    rec.config_hash = m.at("config_hash").get<std::string>();
    rec.geometry.axis_dim = m.at("geometry").at("axis_dim").get<int>();
    rec.geometry.fiber_dim = m.at("geometry").at("fiber_dim").get<int>();
    rec.status = run_status_from_name(m.at("status").get<std::string>());
    rec.degenerate_pinch = m.at("degenerate_pinch").get<bool>();
    rec.t_star = json_double(m.at("t_star").at("value"));
    rec.t_star_uncertainty = json_double(m.at("t_star").at("uncertainty"));
    rec.switch_t = json_double(m.at("switch").at("t"));
    rec.switch_tau = json_double(m.at("switch").at("tau"));
    rec.total_steps = m.at("total_steps").get<long>();

    for (const auto& meta : m.at("snapshots")) {
        rec.snapshots.push_back(
            read_snapshot_csv(dir / meta.at("file").get<std::string>()));
        rec.snapshot_meta.push_back({json_double(meta.at("t_unscaled")),
                                     json_double(meta.at("t_star_used"))});
    }

    {
        std::istringstream in(read_text(dir / "series" / "min_radius.csv"));
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            MinSample s{};
            char* end = nullptr;
            s.t = std::strtod(line.c_str(), &end);
            if (*end == ',') s.u_min = std::strtod(end + 1, &end);
            if (*end == ',') s.argmin_r = std::strtod(end + 1, &end);
            rec.min_radius_series.push_back(s);
        }
    }
    return lr;
}

void write_fit_series(const fs::path& dir, std::span<const FitRow> rows) {
    std::ostringstream os;
    os << "tau,a,b,omega,res_l2,norm_w3,norm_w2_grad,norm_w1_hess\n";
    for (const auto& r : rows) {
        os << g17(r.tau) << "," << g17(r.a) << "," << g17(r.b) << "," << g17(r.omega)
           << "," << g17(r.res_l2) << "," << g17(r.norm_w3) << ","
           << g17(r.norm_w2_grad) << "," << g17(r.norm_w1_hess) << "\n";
    }
    fs::create_directories(dir / "series");
    write_text(dir / "series" / "fit_series.csv", os.str());
}

std::vector<FitRow> load_fit_series(const fs::path& dir) {
    std::istringstream in(read_text(dir / "series" / "fit_series.csv"));
    std::vector<FitRow> rows;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        FitRow r{};
        double* fields[8] = {&r.tau, &r.a, &r.b, &r.omega,
                             &r.res_l2, &r.norm_w3, &r.norm_w2_grad, &r.norm_w1_hess};
        const char* s = line.c_str();
        char* end = nullptr;
        for (int i = 0; i < 8; ++i) {
            *fields[i] = std::strtod(s, &end);
            s = (*end == ',') ? end + 1 : end;
        }
        rows.push_back(r);
    }
    return rows;
}

void write_final_ratio(const fs::path& dir, std::span<const RatioRow> rows) {
    std::ostringstream os;
    os << "x,u_final,ratio,tau_used\n";
    for (const auto& r : rows)
        os << g17(r.x) << "," << g17(r.u_final) << "," << g17(r.ratio) << ","
           << g17(r.tau_used) << "\n";
    fs::create_directories(dir / "series");
    write_text(dir / "series" / "final_ratio.csv", os.str());
}

std::vector<RatioRow> load_final_ratio(const fs::path& dir) {
    std::istringstream in(read_text(dir / "series" / "final_ratio.csv"));
    std::vector<RatioRow> rows;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        RatioRow r{};
        double* fields[4] = {&r.x, &r.u_final, &r.ratio, &r.tau_used};
        const char* s = line.c_str();
        char* end = nullptr;
        for (int i = 0; i < 4; ++i) {
            *fields[i] = std::strtod(s, &end);
            s = (*end == ',') ? end + 1 : end;
        }
        rows.push_back(r);
    }
    return rows;
}

void write_reports(const fs::path& dir, std::span<const VerificationReport> reports) {
    fs::create_directories(dir / "reports");
    std::ostringstream table;
    table << "claim               verdict       trend       worst_dev     samples\n";
    for (const auto& rep : reports) {
        json j;
        j["claim"] = rep.claim;
        json samples = json::array();
        double worst = 0.0;
        for (const auto& s : rep.samples) {
            samples.push_back({{"input", s.input},
                               {"measured", double_json(s.measured)},
                               {"target", s.target},
                               {"deviation", double_json(s.deviation)}});
            worst = std::max(worst, s.deviation);
        }
        j["samples"] = samples;
        j["trend"] = trend_name(rep.trend);
        j["trend_slope"] = double_json(rep.trend_slope);
        j["verdict"] = verdict_name(rep.verdict);
        j["tolerances"] = rep.tolerances;
        j["notes"] = rep.notes;
        write_text(dir / "reports" / (rep.claim + ".json"), j.dump(2) + "\n");

        char line[160];
        std::snprintf(line, sizeof(line), "%-19s %-13s %-11s %-13.6g %zu\n",
                      rep.claim.c_str(), verdict_name(rep.verdict),
                      trend_name(rep.trend), worst, rep.samples.size());
        table << line;
    }
    write_text(dir / "reports" / "summary.txt", table.str());
}

} // namespace pinchflow
