#include "relkin/kinematics.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>

#include "relkin/error.hpp"

namespace relkin {

namespace {
std::atomic<std::uint64_t> g_ell_guard{0};

void check_omega(const Vec3& w) {
    if (std::abs(norm(w) - 1.0) > 1e-12) throw Error(Errc::InvalidInput, "omega must be a unit vector");
}
}  // namespace

double energy(const Vec3& p, double c) { return std::sqrt(c * c + norm2(p)); }

double kinetic_energy(const Vec3& p, double c) {
    double p2 = norm2(p);
    return p2 / (energy(p, c) + c);
}

Vec3 velocity_hat(const Vec3& p, double c) { return (c / energy(p, c)) * p; }

CollisionInvariants invariants(const Vec3& p, const Vec3& q, double c) {
    CollisionInvariants inv;
    const double p0 = energy(p, c), q0 = energy(q, c);
    const Vec3 d = p - q, sum = p + q;
    // g^2 = |p-q|^2 - (p0-q0)^2 with p0 - q0 = (|p|^2-|q|^2)/(p0+q0)
    double de = dot(d, sum) / (p0 + q0);
    double g2 = norm2(d) - de * de;
    if (g2 < 0.0 && std::abs(g2) <= 1e-12 * c * c) g2 = 0.0;
    if (g2 < 0.0) g2 = 0.0;
    inv.g = std::sqrt(g2);
    inv.s = g2 + 4.0 * c * c;
    inv.ell = 0.5 * c * (p0 + q0);
    inv.degenerate = (inv.g == 0.0);
    inv.jmom = inv.degenerate ? 0.0 : c * norm(cross(p, q)) / inv.g;
    return inv;
}

double guarded_ell2_minus_j2(const CollisionInvariants& inv) {
    double v = (inv.ell - inv.jmom) * (inv.ell + inv.jmom);
    if (!(v > 0.0)) {
        g_ell_guard.fetch_add(1, std::memory_order_relaxed);
        return 1e-300;
    }
    return v;
}

std::uint64_t ell_guard_count() { return g_ell_guard.load(); }
void reset_ell_guard_count() { g_ell_guard.store(0); }

double moller_velocity(const Vec3& p, const Vec3& q, double c) {
    CollisionInvariants inv = invariants(p, q, c);
    if (inv.degenerate) return 0.0;
    return 0.25 * c * inv.g * std::sqrt(inv.s) / (energy(p, c) * energy(q, c));
}

double moller_velocity_cross(const Vec3& p, const Vec3& q, double c) {
    Vec3 a = p / energy(p, c), b = q / energy(q, c);
    double r = norm2(a - b) - norm2(cross(a, b));
    return 0.5 * c * std::sqrt(std::max(r, 0.0));
}

ScatterEvent scatter_com(const Vec3& p, const Vec3& q, const Vec3& omega, double c) {
    check_omega(omega);
    ScatterEvent ev{p, q, omega, p, q, energy(p, c), energy(q, c), Representation::CenterOfMomentum, false};
    CollisionInvariants inv = invariants(p, q, c);
    if (inv.degenerate) {
        ev.degenerate = true;
        return ev;
    }
    const double p0 = ev.p_out0, q0 = ev.q_out0;
    const double rs = std::sqrt(inv.s);
    const Vec3 sum = p + q;
    // (gamma0 - 1)/|p+q|^2 = 1/(sqrt(s)(p0 + q0 + sqrt(s)))
    const double gfac = 1.0 / (rs * (p0 + q0 + rs));
    const Vec3 dir = omega + (gfac * dot(sum, omega)) * sum;
    ev.p_out = 0.5 * sum + (0.5 * inv.g) * dir;
    ev.q_out = 0.5 * sum - (0.5 * inv.g) * dir;
    const double shift = 0.5 * (inv.g / rs) * dot(sum, omega);
    ev.p_out0 = 0.5 * (p0 + q0) + shift;
    ev.q_out0 = 0.5 * (p0 + q0) - shift;
    return ev;
}

namespace {

struct GsParts {
    double a, n0, den;
};

GsParts gs_parts(const Vec3& p, const Vec3& q, const Vec3& omega, double p0, double q0) {
    const double e = p0 + q0;
    const double wp = dot(omega, p), wq = dot(omega, q), ws = wp + wq;
    const double den = e * e - ws * ws;
    if (den <= 1e-14 * e * e) throw Error(Errc::DegenerateDenominator, "scatter_gs: (p0+q0)^2 - (w.(p+q))^2 too small");
    const double a = 2.0 * p0 * q0 * e * (wq / q0 - wp / p0) / den;
    const double n0 = 2.0 * ws * (p0 * wq - q0 * wp) / den;
    return {a, n0, den};
}

}  // namespace

double gs_amplitude(const Vec3& p, const Vec3& q, const Vec3& omega, double c) {
    return gs_parts(p, q, omega, energy(p, c), energy(q, c)).a;
}

ScatterEvent scatter_gs(const Vec3& p, const Vec3& q, const Vec3& omega, double c) {
    check_omega(omega);
    const double p0 = energy(p, c), q0 = energy(q, c);
    GsParts g = gs_parts(p, q, omega, p0, q0);
    ScatterEvent ev;
    ev.p = p;
    ev.q = q;
    ev.omega = omega;
    ev.representation = Representation::GlasseyStrauss;
    ev.p_out = p + g.a * omega;
    ev.q_out = q - g.a * omega;
    ev.p_out0 = p0 + g.n0;
    ev.q_out0 = q0 - g.n0;
    ev.degenerate = (g.a == 0.0) && norm2(p - q) == 0.0;
    return ev;
}

ScatterEvent scatter_newton(const Vec3& p, const Vec3& q, const Vec3& omega) {
    ScatterEvent ev;
    ev.p = p;
    ev.q = q;
    ev.omega = omega;
    ev.representation = Representation::Newtonian;
    const double a = dot(omega, q - p);
    ev.p_out = p + a * omega;
    ev.q_out = q - a * omega;
    ev.p_out0 = 0.5 * norm2(ev.p_out);
    ev.q_out0 = 0.5 * norm2(ev.q_out);
    ev.degenerate = norm2(p - q) == 0.0;
    return ev;
}

double kernel_gs_b(const Vec3& p, const Vec3& q, const Vec3& omega, double c) {
    const double p0 = energy(p, c), q0 = energy(q, c), e = p0 + q0;
    const double ws = dot(omega, p + q);
    const double den = e * e - ws * ws;
    const double rel = std::abs(dot(omega, p / p0 - q / q0));
    return c * e * e * p0 * q0 * rel / (den * den);
}

double kernel_gs(const Vec3& p, const Vec3& q, const Vec3& omega, double c) {
    const double p0 = energy(p, c), q0 = energy(q, c);
    return invariants(p, q, c).s / (p0 * q0) * kernel_gs_b(p, q, omega, c);
}

double kernel_newton(const Vec3& p, const Vec3& q, const Vec3& omega) { return std::abs(dot(omega, p - q)); }

double jacobian_residual(const Vec3& p, const Vec3& q, const Vec3& omega, double c, double step_scale) {
    const double h = step_scale * (1.0 + norm(p) + norm(q));
    Eigen::Matrix<double, 6, 6> jac;
    for (int k = 0; k < 6; ++k) {
        Vec3 pp = p, qp = q, pm = p, qm = q;
        if (k < 3) {
            pp[k] += h;
            pm[k] -= h;
        } else {
            qp[k - 3] += h;
            qm[k - 3] -= h;
        }
        ScatterEvent a = scatter_gs(pp, qp, omega, c), b = scatter_gs(pm, qm, omega, c);
        for (int i = 0; i < 3; ++i) {
            jac(i, k) = (a.p_out[i] - b.p_out[i]) / (2.0 * h);
            jac(i + 3, k) = (a.q_out[i] - b.q_out[i]) / (2.0 * h);
        }
    }
    ScatterEvent ev = scatter_gs(p, q, omega, c);
    const double target = ev.p_out0 * ev.q_out0 / (energy(p, c) * energy(q, c));
    return std::abs(jac.determinant() + target) / target;
}

}  // namespace relkin
