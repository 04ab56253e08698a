#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relkin/equilibria.hpp"
#include "relkin/error.hpp"
#include "relkin/kinematics.hpp"

using namespace relkin;

TEST_CASE("Juttner and Gaussian values") {
    CHECK(juttner({0, 0, 0}, 2.0) == doctest::Approx(0.041879104388439280206).epsilon(1e-12));
    CHECK(juttner({0, 0, 0}, 10.0) == doctest::Approx(0.062320041933215536552).epsilon(1e-12));
    CHECK(std::abs(juttner_minus_gaussian({0, 0, 0}, 10.0)) ==
          doctest::Approx(0.001173594001025433234).epsilon(1e-10));
    CHECK(gaussian({0, 0, 0}) == doctest::Approx(std::pow(2 * M_PI, -1.5)));
    // no underflow at large c
    CHECK(juttner({1, 0, 0}, 1e4) == doctest::Approx(gaussian({1, 0, 0})).epsilon(1e-6));
    CHECK(sqrt_juttner({2, 0, 0}, 3.0) == doctest::Approx(std::sqrt(juttner({2, 0, 0}, 3.0))).epsilon(1e-14));
}

TEST_CASE("Equilibrium wraps both regimes") {
    const Equilibrium n(EquilibriumSpec::newtonian_limit()), r(EquilibriumSpec::relativistic(5.0));
    const Vec3 p{0.5, -1, 2};
    CHECK(n.value(p) == doctest::Approx(gaussian(p)));
    CHECK(r.value(p) == doctest::Approx(juttner(p, 5.0)));
    CHECK(r.energy_invariant(p) == doctest::Approx(energy(p, 5.0)));
    CHECK(n.energy_invariant(p) == doctest::Approx(norm2(p)));
}

TEST_CASE("closed-form moments agree with grid quadrature") {
    for (double c : {1.0, 2.0, 5.0, 10.0}) {
        CAPTURE(c);
        CHECK(moments(c).max_gap() <= 1e-6);
    }
}

TEST_CASE("energy variance positive and ~3/(2c^2) at large c") {
    for (double c = 0.5; c < 200.0; c *= 1.3) CHECK(closed_form_moments(c).variance > 0.0);
    const auto m = closed_form_moments(1e4);
    CHECK(m.variance * 1e8 == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(m.kinetic_mean * 1e4 == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("macro basis is orthonormal on the moment grid") {
    for (const auto& spec : {EquilibriumSpec::newtonian_limit(), EquilibriumSpec::relativistic(5.0)}) {
        const VelocityGrid g = default_moment_grid(spec.newtonian ? 100.0 : spec.c);
        const Eigen::MatrixXd G = gram(macro_basis(spec, g), g);
        CHECK((G - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("Maxwellian gap decays like c^-2") {
    std::vector<Vec3> sample;
    for (int i = 0; i <= 1000; ++i) sample.push_back({0.02 * i, 0, 0});
    const double g8 = maxwellian_gap(8.0, 0.0, sample).plain, g16 = maxwellian_gap(16.0, 0.0, sample).plain;
    CHECK(std::log2(g8 / g16) == doctest::Approx(2.0).epsilon(0.1));
    const double r8 = maxwellian_gap(8.0, 0.0, sample).root, r16 = maxwellian_gap(16.0, 0.0, sample).root;
    CHECK(std::log2(r8 / r16) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("weights and radius rule") {
    CHECK(weight({0, 0, 0}, 7.0) == 1.0);
    CHECK(weight({1, 0, 0}, 2.0) == doctest::Approx(2.0));
    CHECK(equilibrium_radius(1.0) == 50.0);
    CHECK(equilibrium_radius(100.0) == 12.0);
}
