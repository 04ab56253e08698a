// relkin command-line front end: verify, simulate, limit, rates.
#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>

#include "relkin/checks.hpp"
#include "relkin/config.hpp"
#include "relkin/csv.hpp"
#include "relkin/error.hpp"
#include "relkin/limit_lab.hpp"
#include "relkin/solver.hpp"

using namespace relkin;

namespace {

constexpr int kPass = 0, kFail = 1, kConfig = 2, kBlowup = 3;

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

int cmd_verify(const std::string& path) {
    const RunConfig cfg = load_config(path);
    const auto rows = verify_suite(cfg.check_settings());
    write_check_csv(out_path(cfg, "verify.csv"), rows, cfg.hash());
    for (const auto& r : rows)
        if (!r.pass) std::cerr << "FAIL " << r.id << ": measured " << fmt_double(r.measured) << ", want " << r.threshold << '\n';
    return all_pass(rows) ? kPass : kFail;
}

int cmd_simulate(const std::string& path) {
    const RunConfig cfg = load_config(path);
    const double c = cfg.c_values.empty() ? std::numeric_limits<double>::infinity() : cfg.c_values.front();
    if (cfg.c_values.size() > 1) throw Error(Errc::Config, "simulate takes a single entry in regime.c_values");
    const SolverConfig sc = cfg.solver(c);
    const RunResult r = run(sc);
    write_time_series_csv(out_path(cfg, "timeseries.csv"), r.series, cfg.hash());
    if (!sc.snapshot_times.empty())
        write_snapshot_csv(out_path(cfg, "snapshots.csv"), r.snapshots, sc.grid(), sc.n_x, cfg.hash());
    if (r.negative_cells > 0) std::cerr << "warning: " << r.negative_cells << " negative-density cell visits\n";
    return kPass;
}

bool within(double v, std::pair<double, double> b) { return v >= b.first && v <= b.second; }

int cmd_limit(const std::string& path) {
    const RunConfig cfg = load_config(path);
    if (cfg.c_values.empty()) throw Error(Errc::Config, "limit needs regime.c_values");
    for (std::size_t i = 0; i < cfg.c_values.size(); ++i)
        if (std::isinf(cfg.c_values[i]) || (i > 0 && !(cfg.c_values[i] > cfg.c_values[i - 1])))
            throw Error(Errc::Config, "regime.c_values must be finite and strictly increasing for limit");
    bool ok = true;

    const KernelSweep k = kernel_sweep(cfg.c_values, kernel_sample_set(400, cfg.seed));
    const auto kb = cfg.thresholds.band_at("kernel");
    {
        CsvWriter w(out_path(cfg, "kernel_rates.csv"), cfg.hash(),
                    {"quantity", "slope", "intercept", "max_residual", "points_used", "in_band"});
        for (const auto& [name, fit] : {std::pair{"kernel", &k.kernel}, std::pair{"scatter", &k.scatter},
                                        std::pair{"velocity", &k.velocity}}) {
            const bool in = within(fit->slope, kb);
            ok = ok && in;
            w.row({name, fmt_double(fit->slope), fmt_double(fit->intercept), fmt_double(fit->max_residual),
                   std::to_string(fit->points.size()), in ? "1" : "0"});
        }
        w.commit();
    }

    if (cfg.solver_sweep) {
        const double c_ref = std::numeric_limits<double>::infinity();
        const SweepResult r = sweep(cfg.sweep_plan(), cfg.solver(c_ref));
        write_sweep_csv(out_path(cfg, "sweep.csv"), r, cfg.hash());
        write_summary_csv(out_path(cfg, "sweep_summary.csv"), r.summary, cfg.hash());
        const auto sb = cfg.thresholds.band_at("sweep");
        for (const auto& s : r.summary) ok = ok && within(s.fit.slope, sb);
        if (!r.error.empty()) {
            std::cerr << "sweep aborted: " << r.error << '\n';
            ok = false;
        }
    }
    return ok ? kPass : kFail;
}

int cmd_rates(const std::string& path) {
    const CsvTable t = read_csv(path);
    const auto rows = summarize_sweep_csv(path);
    std::filesystem::path out(path);
    out.replace_extension();
    write_summary_csv(out.string() + "_refit.csv", rows, t.hash);
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relkin: relativistic and Newtonian Boltzmann kinetics toolkit"};
    app.require_subcommand(1);
    std::string path;
    auto* verify = app.add_subcommand("verify", "run the operator property suites");
    verify->add_option("config", path, "config file")->required();
    auto* simulate = app.add_subcommand("simulate", "run the solver and write time series / snapshots");
    simulate->add_option("config", path, "config file")->required();
    auto* limit = app.add_subcommand("limit", "light-speed sweep and kernel convergence rates");
    limit->add_option("config", path, "config file")->required();
    auto* rates = app.add_subcommand("rates", "refit rates from a sweep CSV");
    rates->add_option("csv", path, "sweep CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kConfig;
    }

    try {
        if (*verify) return cmd_verify(path);
        if (*simulate) return cmd_simulate(path);
        if (*limit) return cmd_limit(path);
        if (*rates) return cmd_rates(path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.code()) {
            case Errc::Config:
            case Errc::InvalidInput:
            case Errc::Io:
                return kConfig;
            case Errc::Blowup:
                return kBlowup;
            default:
                return kFail;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFail;
    }
    return kConfig;
}
