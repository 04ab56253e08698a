#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "relkin/kinematics.hpp"
#include "relkin/linear_ops.hpp"
#include "relkin/quadrature.hpp"

using namespace relkin;

TEST_CASE("collision frequency, Newtonian: quadrature vs closed form") {
    CHECK(nu_newton_exact({0, 0, 0}) == doctest::Approx(10.02651309852400201).epsilon(1e-14));
    for (double r : {0.0, 0.3, 1.0, 2.5, 6.0, 10.0}) {
        CAPTURE(r);
        CHECK(nu_newton({r, 0, 0}) == doctest::Approx(nu_newton_exact({r, 0, 0})).epsilon(1e-12));
    }
}

TEST_CASE("collision frequency, relativistic: direct-integral oracles") {
    CHECK(nu_rel({0, 0, 0}, 2.0) == doctest::Approx(8.2666038597164198474).epsilon(1e-7));
    CHECK(nu_rel({1, 0, 0}, 2.0) == doctest::Approx(9.1478177702622048029).epsilon(1e-7));
    CHECK(nu_rel({1, 0, 0}, 10.0) == doctest::Approx(11.491154994240503283).epsilon(1e-7));
    CHECK(nu_rel({0, 1, 0}, 1e4) == doctest::Approx(nu_newton_exact({1, 0, 0})).epsilon(1e-6));
    CHECK_NOTHROW(nu_checked(EquilibriumSpec::relativistic(5.0), {2, 1, 0}));
}

TEST_CASE("collision frequency grows with |p|") {
    double prev = 0.0;
    for (double r = 0.0; r <= 8.0; r += 0.5) {
        const double v = nu_rel({0, 0, r}, 3.0);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("nu table interpolates the direct quadrature") {
    const auto spec = EquilibriumSpec::relativistic(4.0);
    const NuTable t(spec, 6.0);
    CHECK(t.doubling_gap() < 1e-7);
    for (double r : {0.0, 0.77, 3.1, 5.9}) CHECK(t(r) == doctest::Approx(nu(spec, {r, 0, 0})).epsilon(1e-8));
}

TEST_CASE("kernel k1 oracle and symmetry") {
    CHECK(kernel_parts_newton({1, 0, 0}, {0, 0, 0}).k1 == doctest::Approx(0.31069656037692774487).epsilon(1e-14));
    const Vec3 p{0.4, -1.2, 2.0}, q{1.5, 0.3, -0.7};
    CHECK(kernel_k_newton(p, q) == doctest::Approx(kernel_k_newton(q, p)).epsilon(1e-14));
    for (double c : {1.0, 3.0, 30.0}) CHECK(kernel_k_rel(p, q, c) == doctest::Approx(kernel_k_rel(q, p, c)).epsilon(1e-12));
    CHECK(kernel_k_rel(p, q, 1e4) == doctest::Approx(kernel_k_newton(p, q)).epsilon(1e-6));
}

// int k(p, q) sqrt(J)(q) psi(q) dq = nu(p) sqrt(J)(p) psi(p) for the collision
// invariants psi, by polar quadrature around p (independent of the grid).
TEST_CASE("kernels reproduce nu on the collision invariants") {
    const Rule1D rad = composite_gauss_legendre({0, 0.5, 1, 2, 3, 4, 6, 8, 11, 15, 20, 27, 35, 45}, 12);
    const SphereRule sph = make_sphere_rule(24, 48);
    const Frame f = frame_about({0, 0, 1});
    for (const auto& spec : {EquilibriumSpec::newtonian_limit(), EquilibriumSpec::relativistic(2.0),
                             EquilibriumSpec::relativistic(10.0)}) {
        const Equilibrium eq(spec);
        const Vec3 p{0.8, 0.3, -0.5};
        auto inv = [&](const Vec3& v, int i) {
            switch (i) {
                case 0: return 1.0;
                case 1: return v.x;
                case 2: return eq.energy_invariant(v);
                default: return 0.0;
            }
        };
        const double nup = nu(spec, p);
        for (int i = 0; i < 3; ++i) {
            double s = 0.0;
            for (std::size_t a = 0; a < rad.x.size(); ++a)
                for (std::size_t k = 0; k < sph.size(); ++k) {
                    const Vec3 q = p + rad.x[a] * sphere_node(f, sph, k);
                    s += rad.w[a] * sph.w[k] * rad.x[a] * rad.x[a] * kernel_k(spec, p, q) * eq.sqrt_value(q) * inv(q, i);
                }
            CAPTURE(spec.c);
            CAPTURE(i);
            CHECK(s == doctest::Approx(nup * eq.sqrt_value(p) * inv(p, i)).epsilon(2e-6));
        }
    }
}

TEST_CASE("assembled K: symmetric, subtracted diagonal, matrix-free agrees") {
    const auto spec = EquilibriumSpec::relativistic(5.0);
    const VelocityGrid g(5.0, 11);
    const Eigen::VectorXd nu = nu_on_grid(spec, g);
    const DenseOperator K = assemble_K(spec, g, {}, &nu);
    CHECK((K.matrix - K.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * K.matrix.cwiseAbs().maxCoeff());
    const Eigen::MatrixXd e = macro_basis(spec, g);
    // the subtracted diagonal makes K sqrt(J) = nu sqrt(J) exactly
    CHECK((K.matrix * e.col(0) - nu.cwiseProduct(e.col(0))).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((apply_K_free(spec, g, e, {}, &nu) - K.matrix * e).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS(assemble_K(spec, g));
}

TEST_CASE("L e_i residual shrinks under refinement") {
    const auto spec = EquilibriumSpec::newtonian_limit();
    double prev = INFINITY;
    for (int n : {9, 13, 17}) {
        const VelocityGrid g(6.0, n);
        const Eigen::VectorXd nu = nu_on_grid(spec, g);
        const Eigen::MatrixXd e = macro_basis(spec, g);
        const Eigen::MatrixXd Le = nu.asDiagonal() * e - apply_K_free(spec, g, e, {}, &nu);
        double r = 0.0;
        for (int i = 1; i < 5; ++i) r = std::max(r, Le.col(i).norm() / e.col(i).norm());
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("operator file roundtrip") {
    const auto spec = EquilibriumSpec::newtonian_limit();
    const VelocityGrid g(4.0, 7);
    const Eigen::VectorXd nu = nu_on_grid(spec, g);
    const DenseOperator K = assemble_K(spec, g, {}, &nu);
    const std::string path = "relkin_test_operator.bin";
    write_operator(K, path);
    const DenseOperator R = read_operator(path);
    std::remove(path.c_str());
    CHECK(R.matrix == K.matrix);
    CHECK(R.radius == K.radius);
}

TEST_CASE("macroscopic projection") {
    const auto spec = EquilibriumSpec::relativistic(3.0);
    const VelocityGrid g(6.0, 13);
    const MacroProjector P(spec, g);
    Eigen::VectorXd f(g.size());
    for (std::size_t a = 0; a < g.size(); ++a) f(static_cast<Eigen::Index>(a)) = std::sin(1.0 + g.center(a).x) * std::exp(-dot(g.center(a), g.center(a)) / 3);
    const Eigen::VectorXd pf = P.project(f);
    CHECK((P.project(pf) - pf).cwiseAbs().maxCoeff() < 1e-12);
    // residual orthogonal to every e_i
    CHECK((P.basis().transpose() * (f - pf)).cwiseAbs().maxCoeff() * g.cell_volume() < 1e-12);
    const Eigen::VectorXd e2 = P.basis().col(2);
    const auto coef = P.coefficients(e2);
    CHECK(std::abs(coef.a_coef) < 1e-10);
    CHECK(std::abs(coef.c_coef) < 1e-10);
    CHECK(std::abs(coef.b_coef.x) < 1e-10);
    CHECK(std::abs(coef.b_coef.y) > 0.1);
}

TEST_CASE("coercivity is positive and comparable across regimes") {
    const VelocityGrid g(6.0, 11);
    const double zn = coercivity(LinearOperator(EquilibriumSpec::newtonian_limit(), g));
    const double zr = coercivity(LinearOperator(EquilibriumSpec::relativistic(5.0), g));
    CHECK(zn > 0.0);
    CHECK(zr > 0.0);
    CHECK(std::max(zn, zr) / std::min(zn, zr) < 3.0);
}
