#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "relkin/collision.hpp"
#include "relkin/equilibria.hpp"
#include "relkin/grid.hpp"
#include "relkin/linear_ops.hpp"

namespace relkin {

enum class SpatialMode { Homogeneous, Periodic };
enum class Profile { GaussianBump, OddMode };

struct InitialDataSpec {
    double amplitude = 1e-2;
    Profile profile = Profile::GaussianBump;
    int spatial_mode = 1;
    bool zero_mean_projection = true;
};

struct SolverConfig {
    EquilibriumSpec regime = EquilibriumSpec::newtonian_limit(10.0);
    SpatialMode spatial = SpatialMode::Homogeneous;
    int n_x = 8;
    double length = 6.283185307179586;
    double radius = 7.5;
    int n_v = 25;
    double dt = 0.01;
    double t_end = 3.0;
    InitialDataSpec init;
    bool conservation_fixup = false;
    /// Gamma(f, f) is added when set; evaluated every `gamma_refresh` steps
    /// with the reduced quadrature below and held in between.
    bool nonlinear = false;
    int gamma_refresh = 10;
    int gamma_omega_polar = 2;
    int gamma_omega_azimuth = 4;
    int gamma_q_stride = 2;
    std::vector<double> snapshot_times;
    NuQuadrature nu_quad;
    /// Checks F = J + sqrt(J) f >= 0 after every step.
    bool check_positivity = true;

    double beta() const { return regime.beta; }
    VelocityGrid grid() const { return VelocityGrid(radius, n_v); }
    int spatial_cells() const { return spatial == SpatialMode::Periodic ? n_x * n_x * n_x : 1; }
};

/// nu, K and the macroscopic basis for one regime on one velocity grid.
struct SolverOperators {
    EquilibriumSpec regime;
    VelocityGrid grid;
    Eigen::VectorXd nu;
    Eigen::MatrixXd K;
    std::shared_ptr<const MacroProjector> projector;
    Eigen::MatrixXd psi_weights;  // N x 5: sqrt(J) (1, p, kinetic energy) dV
    Eigen::VectorXd sqrt_eq;
    Eigen::VectorXd eq;
    Eigen::MatrixXd velocity;  // N x 3 transport velocity (p-hat or p)

    SolverOperators(const EquilibriumSpec& spec, const VelocityGrid& grid, const NuQuadrature& quad = {});
};

/// Values over (velocity cells x spatial cells), column-major per spatial cell.
struct DistField {
    Eigen::MatrixXd values;
    double time = 0.0;
    EquilibriumSpec regime;
};

struct TimeSample {
    double t = 0.0;
    double sup_norm = 0.0;  // ||w_beta f||_inf
    std::array<double, 5> moments{};
    double fixup_magnitude = 0.0;
};

struct RunResult {
    std::vector<TimeSample> series;
    std::vector<DistField> snapshots;
    DistField final_state;
    std::size_t negative_cells = 0;
};

DistField build_initial(const SolverConfig& cfg, const SolverOperators& ops);

/// Integrator state carried between steps (previous collision term for the
/// midpoint extrapolation, cached Gamma).
class Stepper {
public:
    Stepper(const SolverConfig& cfg, std::shared_ptr<const SolverOperators> ops);

    DistField step(const DistField& state);
    const SolverOperators& operators() const { return *ops_; }
    double last_fixup() const { return last_fixup_; }
    std::size_t negative_cells() const { return negative_cells_; }

private:
    Eigen::MatrixXd collision_term(const DistField& state);

    SolverConfig cfg_;
    std::shared_ptr<const SolverOperators> ops_;
    Eigen::ArrayXd damp_, phi_;
    Eigen::MatrixXd prev_g_;
    Eigen::MatrixXd gamma_cache_;
    CollisionQuadrature gamma_quad_;
    Eigen::RowVectorXd initial_moments_;
    long steps_ = 0;
    double initial_sup_ = 0.0;
    double last_fixup_ = 0.0;
    std::size_t negative_cells_ = 0;
};

std::array<double, 5> conserved_moments(const DistField& state, const SolverOperators& ops);
double weighted_sup_norm(const DistField& state, const VelocityGrid& grid, double beta);

/// `initial` overrides build_initial (it must live on the operators' grid).
RunResult run(const SolverConfig& cfg, std::shared_ptr<const SolverOperators> ops = nullptr,
              const DistField* initial = nullptr);

/// Least-squares slope of log(sup_norm) against t over [t0, t1].
double decay_slope(const std::vector<TimeSample>& series, double t0, double t1);

/// Periodic shift f(x - v dt) of one velocity row stored as an n^3 block, by
/// separable linear interpolation (equal to trilinear for a uniform shift).
void periodic_shift(const double* in, double* out, int n, double dx, const Vec3& shift);

void write_time_series_csv(const std::string& path, const std::vector<TimeSample>& series, const std::string& hash);
void write_snapshot_csv(const std::string& path, const std::vector<DistField>& snapshots, const VelocityGrid& grid,
                        int n_x, const std::string& hash);

}  // namespace relkin
