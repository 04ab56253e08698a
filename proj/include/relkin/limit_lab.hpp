#pragma once

#include <string>
#include <utility>
#include <vector>

#include "relkin/solver.hpp"

namespace relkin {

enum class DistanceKind { L1pLinfx, LinfWeighted };
std::string to_string(DistanceKind k);
DistanceKind parse_distance_kind(const std::string& s);

struct SweepPlan {
    std::vector<double> c_values{4, 8, 16, 32};
    InitialDataSpec init;
    std::vector<DistanceKind> kinds{DistanceKind::L1pLinfx, DistanceKind::LinfWeighted};
    double beta = 10.0;
    std::vector<double> sample_times{0.5, 1.0, 2.0};
    /// Light speed of the extra run used to estimate the discretization floor
    /// (0 disables the floor detector).
    double floor_c = 1e4;

    void validate() const;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
    std::vector<std::pair<double, double>> points;  // (log c, log value) used in the fit
    std::size_t points_dropped = 0;
};

/// Ordinary least squares of log value on log c. With floor > 0 the two
/// largest-c points are dropped when they differ by less than 3 * floor and at
/// least three points remain.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points, double floor = 0.0);

/// sum_p max_x |F_c - F| dV with F = J + sqrt(J) f reconstructed per regime.
double distance_L1pLinfx(const DistField& fc, const DistField& f, const VelocityGrid& grid);
/// max over cells of w_{beta-6}(p) |f_c - f|.
double distance_Linf_weighted(const DistField& fc, const DistField& f, const VelocityGrid& grid, double beta);
double distance(DistanceKind k, const DistField& fc, const DistField& f, const VelocityGrid& grid, double beta);

struct DistanceRow {
    double c, t;
    DistanceKind kind;
    double value;
};

struct SummaryRow {
    DistanceKind kind;
    double t;
    RateFit fit;
};

struct SweepResult {
    std::vector<DistanceRow> distances;
    std::vector<SummaryRow> summary;
    double floor = 0.0;  // largest floor estimate over kinds and times
    std::string error;   // non-empty when a run aborted the sweep
};

/// Newtonian reference plus one relativistic run per c, all from the same f0
/// (built with the Newtonian macroscopic basis). Solver settings other than the
/// regime come from `templ`.
SweepResult sweep(const SweepPlan& plan, const SolverConfig& templ);

void write_sweep_csv(const std::string& path, const SweepResult& r, const std::string& hash);
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows, const std::string& hash);
/// Rebuilds the summary from a sweep CSV (no floor information, so nothing is dropped).
std::vector<SummaryRow> summarize_sweep_csv(const std::string& path);

struct KernelSample {
    Vec3 p, q, omega;
};

/// Deterministic sample with |p|, |q| <= 5 and |p - q| >= 0.5.
std::vector<KernelSample> kernel_sample_set(std::size_t n = 400, unsigned seed = 7);

struct KernelSweep {
    RateFit kernel;   // max |k_c - k_inf|
    RateFit scatter;  // max |p'_c - p'_inf|
    RateFit velocity; // max |p - p_hat|
};

KernelSweep kernel_sweep(const std::vector<double>& c_values, const std::vector<KernelSample>& sample);

struct GradientSample {
    double t;
    double grad_x;  // ||w_{beta-1} grad_x f||_inf
    double grad_p;  // ||w_{beta-2} grad_p f||_inf
};

struct GradientReport {
    std::vector<GradientSample> series;
    double x_slope = 0.0;
    double p_ratio = 0.0;  // max over t / initial value
    bool ok = false;       // x_slope < 0 and p_ratio <= 5
};

double grad_x_norm(const DistField& f, const VelocityGrid& grid, int n_x, double length, double beta);
double grad_p_norm(const DistField& f, const VelocityGrid& grid, double beta);
GradientReport gradient_decay(const std::vector<DistField>& snapshots, const VelocityGrid& grid, int n_x, double length,
                              double beta);

}  // namespace relkin
