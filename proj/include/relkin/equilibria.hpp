#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "relkin/grid.hpp"
#include "relkin/vec3.hpp"

namespace relkin {

/// Light speed c (relativistic) or the Newtonian tag, plus the weight exponent beta.
struct EquilibriumSpec {
    bool newtonian = false;
    double c = 0.0;
    double beta = 5.0;

    static EquilibriumSpec relativistic(double c, double beta = 5.0);
    static EquilibriumSpec newtonian_limit(double beta = 5.0);
    std::string label() const;
};

/// J_c (or mu) with the normalisation evaluated once.
class Equilibrium {
public:
    explicit Equilibrium(const EquilibriumSpec& spec);

    const EquilibriumSpec& spec() const { return spec_; }
    double value(const Vec3& p) const;
    double sqrt_value(const Vec3& p) const;
    /// log of the density.
    double log_value(const Vec3& p) const;
    /// Energy-like collision invariant: p0 (relativistic) or |p|^2 (Newtonian).
    double energy_invariant(const Vec3& p) const;

private:
    EquilibriumSpec spec_;
    double log_norm_ = 0.0;
};

/// c^2 - c p0 = -|p|^2 / (1 + sqrt(1 + |p|^2/c^2)).
double juttner_exponent(const Vec3& p, double c);
double juttner(const Vec3& p, double c);
double sqrt_juttner(const Vec3& p, double c);
double gaussian(const Vec3& p);
double sqrt_gaussian(const Vec3& p);
double weight(const Vec3& p, double beta);

/// Truncation radius R(c) = max(12, 40/c + 10).
double equilibrium_radius(double c);
/// Quadrature grid used for moments: radius R(c), spacing <= 0.4.
VelocityGrid default_moment_grid(double c);

struct MomentEntry {
    std::string name;
    double closed_form = 0.0;
    double quadrature = 0.0;
    double rel_gap = 0.0;
};

struct MomentTable {
    double c = 0.0;
    std::vector<MomentEntry> entries;  // A1..A10
    const MomentEntry& operator[](int i) const { return entries.at(static_cast<std::size_t>(i - 1)); }
    double max_gap() const;
};

struct ClosedMoments {
    double a[11] = {};  // a[1]..a[10]
    double variance = 0.0;  // A2 - A3^2
    double kinetic_mean = 0.0;  // A3 - c, the mean of p0 - c
};

ClosedMoments closed_form_moments(double c);
MomentTable moments(double c, const VelocityGrid& grid);
MomentTable moments(double c);

struct MaxwellianGap {
    double plain = 0.0;  // max e^{|p|/2} |J_c - mu|
    double root = 0.0;   // max e^{|p|/4} |sqrt(J_c) - sqrt(mu)|
};

/// J_c - mu and sqrt(J_c) - sqrt(mu) without cancellation.
double juttner_minus_gaussian(const Vec3& p, double c);
double sqrt_juttner_minus_gaussian(const Vec3& p, double c);
MaxwellianGap maxwellian_gap(double c, double beta, const std::vector<Vec3>& sample);

/// The five null vectors e0..e4 sampled on the grid (columns).
Eigen::MatrixXd macro_basis(const EquilibriumSpec& spec, const VelocityGrid& grid);
/// Discrete Gram matrix of the columns under the grid inner product.
Eigen::MatrixXd gram(const Eigen::MatrixXd& basis, const VelocityGrid& grid);

}  // namespace relkin
