#include "relkin/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "relkin/csv.hpp"
#include "relkin/error.hpp"

namespace relkin {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw Error(Errc::Config, "config key '" + key + "': " + what);
}

double to_double(const std::string& key, const std::string& v) {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double x;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        bad(key, "expected a number, got '" + v + "'");
    }
    if (used != v.size() || std::isnan(x)) bad(key, "expected a number, got '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x) || std::abs(x) > 1e9) bad(key, "expected an integer, got '" + v + "'");
    return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad(key, "expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    for (const auto& s : split_list(v)) out.push_back(to_double(key, s));
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + (std::isinf(v[i]) ? std::string("inf") : fmt_double(v[i]));
    return s;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::Config, "config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw Error(Errc::Config, "config line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second) bad(key, "given twice");
    }
    return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(Errc::Config, "cannot read config '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

RunConfig resolve_config(const std::map<std::string, std::string>& kv) {
    RunConfig c;
    for (const auto& [key, v] : kv) {
        if (key == "regime.c_values") {
            c.c_values = to_list(key, v);
            for (double x : c.c_values)
                if (!(x > 0.0)) bad(key, "light speeds must be positive");
        } else if (key == "grid.radius") {
            c.radius_auto = v == "auto";
            if (!c.radius_auto) c.radius = to_double(key, v);
            if (!c.radius_auto && !(c.radius > 0.0 && std::isfinite(c.radius))) bad(key, "must be positive or 'auto'");
        } else if (key == "grid.n") {
            c.grid_n = to_int(key, v);
            if (c.grid_n < 3 || c.grid_n % 2 == 0) bad(key, "must be an odd integer >= 3");
        } else if (key == "spatial.mode") {
            if (v == "homogeneous")
                c.spatial = SpatialMode::Homogeneous;
            else if (v == "periodic")
                c.spatial = SpatialMode::Periodic;
            else
                bad(key, "expected homogeneous or periodic");
        } else if (key == "spatial.n") {
            c.spatial_n = to_int(key, v);
            if (c.spatial_n < 2) bad(key, "must be >= 2");
        } else if (key == "spatial.length") {
            c.length = to_double(key, v);
            if (!(c.length > 0.0 && std::isfinite(c.length))) bad(key, "must be positive");
        } else if (key == "time.dt") {
            c.dt = to_double(key, v);
            if (!(c.dt > 0.0 && std::isfinite(c.dt))) bad(key, "must be positive");
        } else if (key == "time.t_end") {
            c.t_end = to_double(key, v);
            if (!(c.t_end > 0.0 && std::isfinite(c.t_end))) bad(key, "must be positive");
        } else if (key == "time.snapshots") {
            c.snapshot_times = to_list(key, v);
        } else if (key == "init.amplitude") {
            c.init.amplitude = to_double(key, v);
            if (!std::isfinite(c.init.amplitude)) bad(key, "must be finite");
        } else if (key == "init.profile") {
            if (v == "gaussian-bump")
                c.init.profile = Profile::GaussianBump;
            else if (v == "odd-mode")
                c.init.profile = Profile::OddMode;
            else
                bad(key, "expected gaussian-bump or odd-mode");
        } else if (key == "init.mode") {
            c.init.spatial_mode = to_int(key, v);
        } else if (key == "init.zero_mean") {
            c.init.zero_mean_projection = to_bool(key, v);
        } else if (key == "weights.beta") {
            c.beta = to_double(key, v);
            if (!(c.beta > 0.0 && std::isfinite(c.beta))) bad(key, "must be positive");
        } else if (key == "quad.omega_order") {
            c.omega_order = to_int(key, v);
            if (c.omega_order < 2 || c.omega_order % 2) bad(key, "must be an even integer >= 2");
        } else if (key == "solver.fixup") {
            c.fixup = to_bool(key, v);
        } else if (key == "solver.nonlinear") {
            c.nonlinear = to_bool(key, v);
        } else if (key == "solver.gamma_refresh") {
            c.gamma_refresh = to_int(key, v);
            if (c.gamma_refresh < 1) bad(key, "must be >= 1");
        } else if (key == "sweep.times") {
            c.sweep_times = to_list(key, v);
        } else if (key == "sweep.kinds") {
            c.sweep_kinds.clear();
            try {
                for (const auto& s : split_list(v)) c.sweep_kinds.push_back(parse_distance_kind(s));
            } catch (const Error& e) {
                bad(key, e.what());
            }
        } else if (key == "sweep.floor_c") {
            c.floor_c = to_double(key, v);
        } else if (key == "limit.solver_sweep") {
            c.solver_sweep = to_bool(key, v);
        } else if (key == "verify.seed") {
            c.seed = static_cast<unsigned>(to_int(key, v));
        } else if (key.rfind("tolerances.", 0) == 0) {
            const std::string id = key.substr(11);
            if (!c.thresholds.tol.count(id)) bad(key, "no such check tolerance");
            c.thresholds.tol[id] = to_double(key, v);
        } else if (key.rfind("bands.", 0) == 0) {
            const std::string name = key.substr(6);
            if (!c.thresholds.band.count(name)) bad(key, "no such band");
            const auto b = to_list(key, v);
            if (b.size() != 2 || !(b[0] < b[1])) bad(key, "expected 'lo, hi' with lo < hi");
            c.thresholds.band[name] = {b[0], b[1]};
        } else if (key == "threads") {
            c.threads = to_int(key, v);
            if (c.threads < 1) bad(key, "must be >= 1");
        } else if (key == "output.dir") {
            if (v.empty()) bad(key, "must not be empty");
            c.output_dir = v;
        } else {
            bad(key, "unknown key");
        }
    }
    return c;
}

RunConfig load_config(const std::string& path) { return resolve_config(parse_config_file(path)); }

std::string RunConfig::canonical() const {
    std::ostringstream os;
    os << "regime.c_values=" << join(c_values) << '\n'
       << "grid.radius=" << (radius_auto ? std::string("auto") : fmt_double(radius)) << '\n'
       << "grid.n=" << grid_n << '\n'
       << "spatial.mode=" << (spatial == SpatialMode::Periodic ? "periodic" : "homogeneous") << '\n'
       << "spatial.n=" << spatial_n << '\n'
       << "spatial.length=" << fmt_double(length) << '\n'
       << "time.dt=" << fmt_double(dt) << '\n'
       << "time.t_end=" << fmt_double(t_end) << '\n'
       << "time.snapshots=" << join(snapshot_times) << '\n'
       << "init.amplitude=" << fmt_double(init.amplitude) << '\n'
       << "init.profile=" << (init.profile == Profile::OddMode ? "odd-mode" : "gaussian-bump") << '\n'
       << "init.mode=" << init.spatial_mode << '\n'
       << "init.zero_mean=" << init.zero_mean_projection << '\n'
       << "weights.beta=" << fmt_double(beta) << '\n'
       << "quad.omega_order=" << omega_order << '\n'
       << "solver.fixup=" << fixup << '\n'
       << "solver.nonlinear=" << nonlinear << '\n'
       << "solver.gamma_refresh=" << gamma_refresh << '\n'
       << "sweep.times=" << join(sweep_times) << '\n';
    os << "sweep.kinds=";
    for (std::size_t i = 0; i < sweep_kinds.size(); ++i) os << (i ? "," : "") << to_string(sweep_kinds[i]);
    os << '\n'
       << "sweep.floor_c=" << fmt_double(floor_c) << '\n'
       << "limit.solver_sweep=" << solver_sweep << '\n'
       << "verify.seed=" << seed << '\n';
    for (const auto& [k, v] : thresholds.tol) os << "tolerances." << k << '=' << fmt_double(v) << '\n';
    for (const auto& [k, v] : thresholds.band)
        os << "bands." << k << '=' << fmt_double(v.first) << ',' << fmt_double(v.second) << '\n';
    // threads and output.dir do not change results
    return os.str();
}

std::string RunConfig::hash() const { return fnv1a_hex(canonical()); }

SolverConfig RunConfig::solver(double c) const {
    SolverConfig s;
    s.regime = std::isinf(c) ? EquilibriumSpec::newtonian_limit(beta) : EquilibriumSpec::relativistic(c, beta);
    s.spatial = spatial;
    s.n_x = spatial_n;
    s.length = length;
    s.radius = radius_auto ? equilibrium_radius(std::isinf(c) ? 1e3 : c) : radius;
    s.n_v = grid_n;
    s.dt = dt;
    s.t_end = t_end;
    s.init = init;
    s.conservation_fixup = fixup;
    s.nonlinear = nonlinear;
    s.gamma_refresh = gamma_refresh;
    s.snapshot_times = snapshot_times;
    s.nu_quad.omega_polar = omega_order;
    s.nu_quad.omega_azimuth = 2 * omega_order;
    return s;
}

SweepPlan RunConfig::sweep_plan() const {
    SweepPlan p;
    p.c_values = c_values;
    p.init = init;
    p.kinds = sweep_kinds;
    p.beta = beta;
    p.sample_times = sweep_times;
    p.floor_c = floor_c;
    return p;
}

CheckSettings RunConfig::check_settings() const {
    CheckSettings s;
    s.thresholds = thresholds;
    s.seed = seed;
    s.omega_order = omega_order;
    return s;
}

}  // namespace relkin
