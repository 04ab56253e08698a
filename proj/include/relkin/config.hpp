#pragma once

#include <map>
#include <string>
#include <vector>

#include "relkin/checks.hpp"
#include "relkin/limit_lab.hpp"
#include "relkin/solver.hpp"

namespace relkin {

/// Raw `key = value` pairs; '#' starts a comment. Duplicate keys are an error.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::string& path);

struct RunConfig {
    std::vector<double> c_values;  // +inf stands for the Newtonian regime
    bool radius_auto = false;
    double radius = 7.5;
    int grid_n = 25;
    SpatialMode spatial = SpatialMode::Homogeneous;
    int spatial_n = 8;
    double length = 6.283185307179586;
    double dt = 0.01;
    double t_end = 3.0;
    std::vector<double> snapshot_times;
    InitialDataSpec init;
    double beta = 10.0;
    int omega_order = 16;
    bool fixup = false;
    bool nonlinear = false;
    int gamma_refresh = 10;
    std::vector<double> sweep_times{0.5, 1.0, 2.0};
    std::vector<DistanceKind> sweep_kinds{DistanceKind::L1pLinfx, DistanceKind::LinfWeighted};
    double floor_c = 1e4;
    bool solver_sweep = true;
    unsigned seed = 20240611;
    Thresholds thresholds = Thresholds::defaults();
    int threads = 1;
    std::string output_dir = "out";

    /// Canonical text of every resolved value; its FNV-1a hash tags outputs.
    std::string canonical() const;
    std::string hash() const;

    /// Solver settings for light speed c (+inf for Newtonian).
    SolverConfig solver(double c) const;
    SweepPlan sweep_plan() const;
    CheckSettings check_settings() const;
};

/// Throws Error(Config) for unknown keys or malformed values.
RunConfig resolve_config(const std::map<std::string, std::string>& kv);
RunConfig load_config(const std::string& path);

}  // namespace relkin
