#pragma once

#include <cstdint>

#include "relkin/vec3.hpp"

namespace relkin {

/// p0 = sqrt(c^2 + |p|^2) (unit rest mass).
double energy(const Vec3& p, double c);

/// p0 - c, without cancellation.
double kinetic_energy(const Vec3& p, double c);

/// p_hat = c p / p0.
Vec3 velocity_hat(const Vec3& p, double c);

struct CollisionInvariants {
    double s = 0.0;     // squared CoM energy
    double g = 0.0;     // relative momentum
    double ell = 0.0;   // c (p0 + q0) / 2
    double jmom = 0.0;  // c |p x q| / g, 0 when g = 0
    bool degenerate = false;
};

CollisionInvariants invariants(const Vec3& p, const Vec3& q, double c);

/// ell^2 - j^2 with the guard: non-positive values are clamped to 1e-300 and counted.
double guarded_ell2_minus_j2(const CollisionInvariants& inv);
std::uint64_t ell_guard_count();
void reset_ell_guard_count();

/// (c/4) g sqrt(s) / (p0 q0).
double moller_velocity(const Vec3& p, const Vec3& q, double c);
/// (c/2) sqrt(|p/p0 - q/q0|^2 - |p/p0 x q/q0|^2).
double moller_velocity_cross(const Vec3& p, const Vec3& q, double c);

enum class Representation { CenterOfMomentum, GlasseyStrauss, Newtonian };

struct ScatterEvent {
    Vec3 p, q, omega;
    Vec3 p_out, q_out;
    double p_out0 = 0.0, q_out0 = 0.0;  // energies from the representation's own formula
    Representation representation = Representation::GlasseyStrauss;
    bool degenerate = false;
};

ScatterEvent scatter_com(const Vec3& p, const Vec3& q, const Vec3& omega, double c);
ScatterEvent scatter_gs(const Vec3& p, const Vec3& q, const Vec3& omega, double c);
ScatterEvent scatter_newton(const Vec3& p, const Vec3& q, const Vec3& omega);

/// Glassey-Strauss scalar a(p, q, omega) with p' = p + a omega.
double gs_amplitude(const Vec3& p, const Vec3& q, const Vec3& omega, double c);

/// B(p, q, omega) of the Glassey-Strauss kernel.
double kernel_gs_b(const Vec3& p, const Vec3& q, const Vec3& omega, double c);
/// K_c(p, q, omega) = s / (p0 q0) * B.
double kernel_gs(const Vec3& p, const Vec3& q, const Vec3& omega, double c);
/// K_inf(p, q, omega) = |omega . (p - q)|.
double kernel_newton(const Vec3& p, const Vec3& q, const Vec3& omega);

/// Relative residual of the central-difference Jacobian determinant of the
/// Glassey-Strauss map against -p'0 q'0 / (p0 q0). Step h = step_scale (1 + |p| + |q|).
double jacobian_residual(const Vec3& p, const Vec3& q, const Vec3& omega, double c, double step_scale = 1e-5);

}  // namespace relkin
