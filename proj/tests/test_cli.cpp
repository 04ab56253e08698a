#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "relkin/csv.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::absolute("cli_test_work");

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RELKIN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string write_file(const std::string& name, const std::string& text) {
    fs::create_directories(kWork);
    const fs::path p = kWork / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string out_dir(const std::string& tag) { return "output.dir = " + (kWork / tag).string() + "\n"; }

const std::string kSmall = "grid.radius = 5\ngrid.n = 9\ntime.t_end = 0.3\n";

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate x.cfg") == 2);
    CHECK(run_cli("simulate") == 2);
    CHECK(run_cli("simulate /nonexistent/relkin.cfg") == 2);
    CHECK(run_cli("verify " + write_file("bad_key.cfg", "grid.nn = 9\n")) == 2);
    CHECK(run_cli("simulate " + write_file("bad_value.cfg", "time.dt = -1\n")) == 2);
}

TEST_CASE("simulate: zero amplitude gives a zero series") {
    const auto cfg = write_file("zero.cfg", kSmall + "init.amplitude = 0\n" + out_dir("zero"));
    REQUIRE(run_cli("simulate " + cfg) == 0);
    const relkin::CsvTable t = relkin::read_csv((kWork / "zero" / "timeseries.csv").string());
    CHECK(t.hash.size() == 16);
    CHECK(t.header.front() == "t");
    CHECK(t.rows.size() == 31);
    for (const auto& r : t.rows) CHECK(std::stod(r[1]) == 0.0);
}

TEST_CASE("simulate: byte-identical reruns, snapshots written") {
    const auto cfg = write_file("det.cfg", kSmall + "regime.c_values = 8\ntime.snapshots = 0, 0.1, 0.3\n" + out_dir("det"));
    REQUIRE(run_cli("simulate " + cfg) == 0);
    const std::string a = slurp(kWork / "det" / "timeseries.csv"), sa = slurp(kWork / "det" / "snapshots.csv");
    REQUIRE(run_cli("simulate " + cfg) == 0);
    CHECK(a == slurp(kWork / "det" / "timeseries.csv"));
    CHECK(sa == slurp(kWork / "det" / "snapshots.csv"));
    CHECK(!fs::exists(kWork / "det" / "timeseries.csv.tmp"));
    const relkin::CsvTable t = relkin::read_csv((kWork / "det" / "timeseries.csv").string());
    double prev = INFINITY;
    for (const auto& r : t.rows) {
        CHECK(std::stod(r[1]) <= prev);
        prev = std::stod(r[1]);
    }
}

TEST_CASE("simulate: blow-up exits 3") {
    const auto cfg = write_file("blow.cfg", "grid.radius = 5\ngrid.n = 9\ntime.t_end = 1\ninit.amplitude = 200\n"
                                            "init.zero_mean = false\nsolver.nonlinear = true\nsolver.gamma_refresh = 1\n" +
                                                out_dir("blow"));
    CHECK(run_cli("simulate " + cfg) == 3);
}

TEST_CASE("limit: kernel-only sweep and band handling") {
    const std::string base = "regime.c_values = 8, 16, 32, 64, 128\nlimit.solver_sweep = false\n";
    CHECK(run_cli("limit " + write_file("lim.cfg", base + out_dir("lim"))) == 0);
    const relkin::CsvTable t = relkin::read_csv((kWork / "lim" / "kernel_rates.csv").string());
    REQUIRE(t.rows.size() == 3);
    for (const auto& r : t.rows) CHECK(r.back() == "1");
    CHECK(run_cli("limit " + write_file("lim_band.cfg", base + "bands.kernel = -5, -4\n" + out_dir("lim_band"))) == 1);
    CHECK(run_cli("limit " + write_file("lim_noc.cfg", "limit.solver_sweep = false\n" + out_dir("lim_noc"))) == 2);
}

TEST_CASE("rates: exact power law, determinism, empty input") {
    std::string text = "# config_hash=0123456789abcdef\nc,t,distance_kind,value\n";
    for (double c : {4.0, 8.0, 16.0, 32.0})
        for (double t : {0.5, 1.0})
            text += relkin::fmt_double(c) + "," + relkin::fmt_double(t) + ",Linf-weighted," +
                    relkin::fmt_double(0.3 * t * std::pow(c, -2.0)) + "\n";
    const auto csv = write_file("power.csv", text);
    REQUIRE(run_cli("rates " + csv) == 0);
    const fs::path out = kWork / "power_refit.csv";
    const relkin::CsvTable s = relkin::read_csv(out.string());
    CHECK(s.hash == "0123456789abcdef");
    REQUIRE(s.rows.size() == 2);
    for (const auto& r : s.rows) CHECK(std::stod(r[2]) == doctest::Approx(-2.0).epsilon(1e-12));
    const std::string first = slurp(out);
    REQUIRE(run_cli("rates " + csv) == 0);
    CHECK(slurp(out) == first);
    CHECK(run_cli("rates " + write_file("empty.csv", "")) == 2);
    CHECK(run_cli("rates " + write_file("header_only.csv", "c,t,distance_kind,value\n")) == 2);
}
