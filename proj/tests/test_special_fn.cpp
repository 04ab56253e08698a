#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relkin/error.hpp"
#include "relkin/special_fn.hpp"

using namespace relkin;

// reference values: tests/oracles/make_oracles.py (mpmath, integral definition)
TEST_CASE("bessel_k matches frozen oracles on both branches") {
    struct Ref {
        int j;
        double z, value;
    } refs[] = {{2, 1.0, 1.6248388986351774828},   {3, 1.0, 7.101262824737944506},
                {2, 0.5, 7.5501835512408694366},   {3, 5.0, 0.0082917684152309321748},
                {2, 50.0, 3.5479318388581977384e-23}, {0, 2.0, 0.11389387274953343565},
                {1, 2.0, 0.13986588181652242728}};
    for (const auto& r : refs) {
        CAPTURE(r.j);
        CAPTURE(r.z);
        CHECK(bessel_k(r.j, r.z).value == doctest::Approx(r.value).epsilon(1e-10));
    }
    CHECK(bessel_k(2, 50.0).method == BesselMethod::AsymptoticSeries);
    CHECK(bessel_k(2, 1.0).method == BesselMethod::IntegralQuadrature);
}

TEST_CASE("branches agree inside the overlap window") {
    for (double z : {20.0, 25.0, 30.0, 35.0, 40.0})
        for (int j = 0; j <= 4; ++j) {
            const double a = bessel_k_quadrature(j, z).scaled, b = bessel_k_series(j, z).scaled;
            CHECK(std::abs(a / b - 1.0) < 1e-10);
        }
}

TEST_CASE("scaled value survives where K_j underflows") {
    const auto r = bessel_k(2, 1e4);
    CHECK(r.value == 0.0);
    CHECK(r.scaled * std::sqrt(2e4 / M_PI) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("ratio K3/K2") {
    CHECK(bessel_ratio_32(1.0) == doctest::Approx(4.3704411746314179401).epsilon(1e-10));
    for (double z : {0.1, 1.0, 10.0, 100.0, 1e4, 1e8}) CHECK(bessel_ratio_32(z) > 1.0);
    // r - 1 ~ 5/(2z) at large z, formed without cancellation
    const double z = 1e10;
    CHECK(bessel_ratio_32_minus_one(z) == doctest::Approx(2.5 / z + 15.0 / (8 * z * z)).epsilon(1e-12));
}

TEST_CASE("recurrence K_{j+1} = K_{j-1} + 2j/z K_j") {
    for (double z : {0.5, 3.0, 29.0, 31.0, 200.0})
        for (int j = 1; j <= 3; ++j) {
            const double km = bessel_k(j - 1, z).scaled, k0 = bessel_k(j, z).scaled, kp = bessel_k(j + 1, z).scaled;
            CHECK(std::abs(kp - km - 2.0 * j / z * k0) / kp < 1e-9);
        }
}

TEST_CASE("monotone in order: K_j < K_{j+1}") {
    for (double z : {0.3, 2.0, 40.0})
        for (int j = 0; j < 4; ++j) CHECK(bessel_k(j, z).scaled < bessel_k(j + 1, z).scaled);
}

TEST_CASE("bessel_i0") {
    CHECK(bessel_i0(2.0) == doctest::Approx(2.2795853023360672674).epsilon(1e-12));
    CHECK(bessel_i0(0.0) == doctest::Approx(1.0));
    CHECK(bessel_i0_scaled(400.0) * std::sqrt(2 * M_PI * 400.0) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("invalid arguments") {
    CHECK_THROWS_AS(bessel_k(2, 0.0), Error);
    CHECK_THROWS_AS(bessel_k(-1, 1.0), Error);
    CHECK_THROWS_AS(bessel_i0(-1.0), Error);
}
