#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "relkin/equilibria.hpp"
#include "relkin/grid.hpp"
#include "relkin/sphere.hpp"
#include "relkin/vec3.hpp"

namespace relkin {

/// Quadrature used for the collision frequency. The q-integral is taken in
/// coordinates (rho, r) = (|q - p|, |q|) around p; radial panels have
/// `radial_order` Gauss-Legendre nodes each.
struct NuQuadrature {
    int omega_polar = 16;
    int omega_azimuth = 32;
    int radial_order = 8;

    NuQuadrature doubled() const { return {2 * omega_polar, 2 * omega_azimuth, 2 * radial_order}; }
};

double nu_rel(const Vec3& p, double c, const NuQuadrature& quad = {});
double nu_newton(const Vec3& p, const NuQuadrature& quad = {});
double nu(const EquilibriumSpec& spec, const Vec3& p, const NuQuadrature& quad = {});
/// Closed form 2 pi [sqrt(2/pi) e^{-|p|^2/2} + (|p| + 1/|p|) erf(|p|/sqrt 2)].
double nu_newton_exact(const Vec3& p);
/// nu with a node-doubling check; throws QuadratureUnderResolved above 1e-4 relative change.
double nu_checked(const EquilibriumSpec& spec, const Vec3& p, const NuQuadrature& quad = {});

/// nu as a function of |p| on [0, radius], Chebyshev-Lobatto interpolation.
class NuTable {
public:
    NuTable(const EquilibriumSpec& spec, double radius, const NuQuadrature& quad = {}, int nodes = 33);
    double operator()(double r) const;
    double radius() const { return radius_; }
    /// Largest relative change seen in the node-doubling checks.
    double doubling_gap() const { return doubling_gap_; }

private:
    double radius_;
    std::vector<double> x_, f_, w_;
    double doubling_gap_ = 0.0;
};

Eigen::VectorXd nu_on_grid(const EquilibriumSpec& spec, const VelocityGrid& grid, const NuQuadrature& quad = {});

/// Split kernels k1 (loss part) and k2 (gain part); k = k2 - k1.
struct KernelParts {
    double k1 = 0.0;
    double k2 = 0.0;
    double value() const { return k2 - k1; }
};

KernelParts kernel_parts_rel(const Vec3& p, const Vec3& q, double c);
KernelParts kernel_parts_newton(const Vec3& p, const Vec3& q);
double kernel_k_rel(const Vec3& p, const Vec3& q, double c);
double kernel_k_newton(const Vec3& p, const Vec3& q);
double kernel_k(const EquilibriumSpec& spec, const Vec3& p, const Vec3& q);

/// Integral of k(p, .) over the axis-aligned cube of side h centred at p
/// (six pyramids with apex at p, Gauss-Legendre of order m on each axis).
double self_cell_integral(const EquilibriumSpec& spec, const Vec3& p, double h, int m = 4);

enum class DiagonalRule {
    /// K[p][p] = 0.
    Zero,
    /// Integral of k(p, .) over the cell of p.
    SelfCell,
    /// Singularity subtraction against sqrt(J): K[p][p] chosen so that
    /// (K sqrt J)(p) = nu(p) sqrt J(p), the exact value of that integral.
    Subtracted,
};

struct AssemblyOptions {
    DiagonalRule diagonal = DiagonalRule::Subtracted;
    /// Combine the h-lattice and 2h-sublattice sums as (16 S_h - S_2h)/15.
    bool richardson = true;
    /// Cell-averaged entries for the 26 lattice neighbours (symmetrised).
    bool near_field = false;
    int near_field_order = 4;
};

struct DenseOperator {
    Eigen::MatrixXd matrix;  // row = output p, column = input q; includes the cell volume
    double radius = 0.0;
    int n_per_axis = 0;
    std::string weight;  // conjugation applied to the kernel, empty when none
};

/// `nu` (collision frequency on the grid) is required for DiagonalRule::Subtracted.
DenseOperator assemble_K(const EquilibriumSpec& spec, const VelocityGrid& grid, const AssemblyOptions& opt = {},
                         const Eigen::VectorXd* nu = nullptr);
/// K applied to the columns of x without storing K (same entries as assemble_K).
Eigen::MatrixXd apply_K_free(const EquilibriumSpec& spec, const VelocityGrid& grid, const Eigen::MatrixXd& x,
                             const AssemblyOptions& opt = {}, const Eigen::VectorXd* nu = nullptr);

void write_operator(const DenseOperator& op, const std::string& path);
DenseOperator read_operator(const std::string& path);

/// L = nu - K on a fixed grid.
class LinearOperator {
public:
    LinearOperator(const EquilibriumSpec& spec, const VelocityGrid& grid, const NuQuadrature& quad = {},
                   const AssemblyOptions& opt = {});

    const EquilibriumSpec& spec() const { return spec_; }
    const VelocityGrid& grid() const { return grid_; }
    const Eigen::VectorXd& nu() const { return nu_; }
    const Eigen::MatrixXd& K() const { return K_.matrix; }
    const DenseOperator& dense() const { return K_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& f) const;

private:
    EquilibriumSpec spec_;
    VelocityGrid grid_;
    Eigen::VectorXd nu_;
    DenseOperator K_;
};

Eigen::VectorXd apply_L(const LinearOperator& op, const Eigen::VectorXd& f);

struct MacroCoefficients {
    double a_coef = 0.0;
    Vec3 b_coef;
    double c_coef = 0.0;
};

/// Orthogonal projection onto span{e0..e4} under the discrete inner product.
class MacroProjector {
public:
    MacroProjector(const EquilibriumSpec& spec, const VelocityGrid& grid);

    const Eigen::MatrixXd& basis() const { return e_; }
    /// Coordinates in the e-basis (a, sqrt(A1) b, c).
    Eigen::VectorXd coordinates(const Eigen::VectorXd& f) const;
    MacroCoefficients coefficients(const Eigen::VectorXd& f) const;
    Eigen::VectorXd project(const Eigen::VectorXd& f) const;
    /// Projection applied to each column.
    Eigen::MatrixXd project(const Eigen::MatrixXd& f) const;

private:
    Eigen::MatrixXd e_;
    Eigen::MatrixXd ginv_et_;  // G^{-1} E^T dV
    double sqrt_a1_ = 1.0;
};

std::pair<MacroCoefficients, Eigen::VectorXd> project_P(const MacroProjector& proj, const Eigen::VectorXd& f);

/// min <Lg,g>/<nu g,g> over the discrete complement of span{e0..e4}.
double coercivity(const LinearOperator& op);

}  // namespace relkin
