#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "relkin/kinematics.hpp"

using namespace relkin;

namespace {
Vec3 random_ball(std::mt19937_64& rng, double r) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        Vec3 v{u(rng), u(rng), u(rng)};
        if (norm2(v) <= 1.0) return v * r;
    }
}
}  // namespace

TEST_CASE("energy and velocity") {
    CHECK(energy({1, 2, 2}, 10.0) == doctest::Approx(10.44030650891055018).epsilon(1e-15));
    CHECK(kinetic_energy({1e-3, 0, 0}, 1e4) == doctest::Approx(5e-11).epsilon(1e-9));
    const Vec3 v = velocity_hat({3, 0, 4}, 5.0);
    CHECK(norm(v) < 5.0);
    CHECK(v.x / v.z == doctest::Approx(0.75));
}

TEST_CASE("invariants match oracle") {
    const auto inv = invariants({1, 0, 0}, {0, 1, 0}, 2.0);
    CHECK(inv.s == doctest::Approx(18.0).epsilon(1e-14));
    CHECK(inv.g == doctest::Approx(1.4142135623730950488).epsilon(1e-12));
    CHECK(inv.ell == doctest::Approx(4.4721359549995793928).epsilon(1e-14));
    CHECK(inv.jmom == doctest::Approx(1.4142135623730950488).epsilon(1e-12));
    CHECK(moller_velocity({2, 0, 0}, {-2, 0, 0}, 5.0) == doctest::Approx(1.8569533817705186315).epsilon(1e-13));
}

TEST_CASE("Moller velocity: two formulas agree") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const Vec3 p = random_ball(rng, 5), q = random_ball(rng, 5);
        const double c = 1.0 + 20.0 * i / 200.0;
        CHECK(moller_velocity(p, q, c) == doctest::Approx(moller_velocity_cross(p, q, c)).epsilon(1e-9));
    }
}

TEST_CASE("Glassey-Strauss amplitude and kernel oracles") {
    const Vec3 p{1, 0, 0}, q{0, -1, 0};
    const Vec3 w = Vec3{1, 1, 1} / std::sqrt(3.0);
    CHECK(gs_amplitude(p, q, w, 2.0) == doctest::Approx(-1.154700538379251529).epsilon(1e-13));
    CHECK(scatter_gs(p, q, w, 2.0).p_out.x == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(kernel_gs(p, q, w, 2.0) == doctest::Approx(0.92951600308978005244).epsilon(1e-12));
}

TEST_CASE("scattering conserves momentum and energy and stays on shell") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 p = random_ball(rng, 5), q = random_ball(rng, 5);
        const Vec3 w = random_ball(rng, 1.0);
        if (norm(w) < 0.1) continue;
        const Vec3 u = w / norm(w);
        const double c = std::exp(std::log(100.0) * i / 2000.0);
        for (const ScatterEvent& e : {scatter_gs(p, q, u, c), scatter_com(p, q, u, c)}) {
            CHECK(norm(e.p_out + e.q_out - p - q) <= 1e-11 * (norm(p) + norm(q)));
            const double en = energy(p, c) + energy(q, c);
            CHECK(std::abs(e.p_out0 + e.q_out0 - en) <= 1e-11 * en);
            CHECK(std::abs(e.p_out0 - energy(e.p_out, c)) <= 1e-10 * e.p_out0);
        }
    }
}

TEST_CASE("Newtonian scattering conserves |p|^2 + |q|^2") {
    const Vec3 p{1, 2, -0.5}, q{-1, 0.3, 2}, w0{0.3, -0.4, 0.866};
    const Vec3 w = w0 / norm(w0);
    const auto e = scatter_newton(p, q, w);
    CHECK(norm2(e.p_out) + norm2(e.q_out) == doctest::Approx(norm2(p) + norm2(q)).epsilon(1e-14));
    CHECK(kernel_newton(p, q, w) == doctest::Approx(std::abs(dot(w, p - q))));
}

TEST_CASE("degenerate collision returns identity with a flag") {
    const Vec3 p{1, 1, 0};
    const auto e = scatter_gs(p, p, Vec3{0, 0, 1}, 3.0);
    CHECK(e.degenerate);
    CHECK(norm(e.p_out - p) == 0.0);
}

TEST_CASE("Jacobian identity and second-order residual") {
    std::mt19937_64 rng(3);
    double r1 = 0, r2 = 0;
    for (int i = 0; i < 100; ++i) {
        const Vec3 p = random_ball(rng, 5), q = random_ball(rng, 5);
        Vec3 w = random_ball(rng, 1.0);
        if (norm(w) < 0.1) continue;
        w = w / norm(w);
        const double c = 1.0 + i;
        CHECK(jacobian_residual(p, q, w, c) < 1e-5);
        r1 += jacobian_residual(p, q, w, c, 2e-3);
        r2 += jacobian_residual(p, q, w, c, 1e-3);
    }
    CHECK(std::log2(r1 / r2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("ell^2 - j^2 guard counts clamps") {
    reset_ell_guard_count();
    CollisionInvariants inv;
    inv.ell = 1.0;
    inv.jmom = 1.0;
    CHECK(guarded_ell2_minus_j2(inv) == 1e-300);
    CHECK(ell_guard_count() == 1);
}
