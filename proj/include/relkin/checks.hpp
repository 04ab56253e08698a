#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "relkin/limit_lab.hpp"
#include "relkin/solver.hpp"

namespace relkin {

struct CheckRow {
    std::string id;
    std::string anchor;
    bool pass = false;
    double measured = 0.0;
    std::string threshold;
};

/// Upper-bound tolerances and slope bands, keyed by check id / band name.
struct Thresholds {
    std::map<std::string, double> tol;
    std::map<std::string, std::pair<double, double>> band;

    static Thresholds defaults();
    double at(const std::string& id) const;
    std::pair<double, double> band_at(const std::string& name) const;
};

struct CheckSettings {
    Thresholds thresholds = Thresholds::defaults();
    unsigned seed = 20240611;
    std::size_t kinematic_samples = 100000;
    std::size_t jacobian_samples = 1000;
    /// L e_i refinement pair on a radius-6 ball (cells per axis).
    int residual_n_coarse = 27;
    int residual_n_fine = 35;
    /// Symmetry and coercivity grid.
    double operator_radius = 6.0;
    int operator_n = 15;
    int omega_order = 16;  // polar order of the nu sphere rule
    /// Solver criteria.
    SolverConfig solver;
    SolverConfig periodic;
    SweepPlan sweep;

    CheckSettings();
};

std::vector<CheckRow> check_kinematics(const CheckSettings& s);
std::vector<CheckRow> check_jacobian(const CheckSettings& s);
std::vector<CheckRow> check_bessel(const CheckSettings& s);
std::vector<CheckRow> check_moments(const CheckSettings& s);
std::vector<CheckRow> check_maxwellian_gap(const CheckSettings& s);
std::vector<CheckRow> check_kernel_rates(const CheckSettings& s);
std::vector<CheckRow> check_linear_operator(const CheckSettings& s);
std::vector<CheckRow> check_collision(const CheckSettings& s);
std::vector<CheckRow> check_decay(const CheckSettings& s);
std::vector<CheckRow> check_newtonian_limit(const CheckSettings& s);
std::vector<CheckRow> check_regularity(const CheckSettings& s);

/// Property suites for the operator modules (everything except the solver runs).
std::vector<CheckRow> verify_suite(const CheckSettings& s);

bool all_pass(const std::vector<CheckRow>& rows);
void write_check_csv(const std::string& path, const std::vector<CheckRow>& rows, const std::string& hash);

}  // namespace relkin
