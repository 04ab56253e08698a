#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "relkin/equilibria.hpp"
#include "relkin/grid.hpp"
#include "relkin/sphere.hpp"

namespace relkin {

/// Discrete dq domega measure for the collision integrals. The omega rule is
/// rotated per (p, q) onto the relative-velocity axis; q runs over the grid
/// cells on a sublattice of stride `q_stride` (origin included) with |q| <= q_cutoff.
struct CollisionQuadrature {
    SphereRule omega = make_sphere_rule(16, 32);
    int q_stride = 1;
    double q_cutoff = std::numeric_limits<double>::infinity();
    Interpolation interpolation = Interpolation::Trilinear;

    static CollisionQuadrature make(int omega_polar, int omega_azimuth, int q_stride = 1);
    double omega_weight_sum() const;
};

struct GammaResult {
    Eigen::VectorXd gain;
    Eigen::VectorXd loss;
    Eigen::VectorXd total() const { return gain - loss; }
};

/// Gamma(h1, h2) at the given momenta (grid centres when `points` is null).
/// h1, h2 are grid vectors; post-collision values use trilinear interpolation.
GammaResult gamma(const EquilibriumSpec& spec, const VelocityGrid& grid, const Eigen::VectorXd& h1,
                  const Eigen::VectorXd& h2, const CollisionQuadrature& quad = {},
                  const std::vector<Vec3>* points = nullptr);
GammaResult gamma_rel(const Eigen::VectorXd& h1, const Eigen::VectorXd& h2, double c, const VelocityGrid& grid,
                      const CollisionQuadrature& quad = {}, const std::vector<Vec3>* points = nullptr);
GammaResult gamma_newton(const Eigen::VectorXd& h1, const Eigen::VectorXd& h2, const VelocityGrid& grid,
                         const CollisionQuadrature& quad = {}, const std::vector<Vec3>* points = nullptr);

struct GammaBound {
    double ratio = 0.0;       // ||nu^{-1} w_beta Gamma||_inf / (||w_beta h1||_inf ||w_beta h2||_inf)
    double gain_ratio = 0.0;  // ||w_beta Gamma^+||_inf / (same denominator)
};

/// Weighted boundedness ratios; `nu` holds the collision frequency at the evaluation points.
GammaBound gamma_bound_check(const Eigen::VectorXd& h1, const Eigen::VectorXd& h2, const EquilibriumSpec& spec,
                             double beta, const VelocityGrid& grid, const CollisionQuadrature& quad,
                             const std::vector<Vec3>& points, const Eigen::VectorXd& nu);

}  // namespace relkin
