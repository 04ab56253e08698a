#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "relkin/error.hpp"
#include "relkin/limit_lab.hpp"

using namespace relkin;

namespace {

template <class F>
Errc code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::Io;  // sentinel: nothing thrown
}

DistField zeros(const VelocityGrid& g, int cols, const EquilibriumSpec& spec) {
    DistField f;
    f.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.size()), cols);
    f.regime = spec;
    return f;
}

}  // namespace

TEST_CASE("fit_rate recovers an exact power law") {
    std::vector<std::pair<double, double>> pts;
    for (double c : {4.0, 8.0, 16.0, 32.0}) pts.emplace_back(c, 5.0 * std::pow(c, -2.0));
    const RateFit f = fit_rate(pts);
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(f.max_residual < 1e-12);
    CHECK(f.points.size() == 4);
    CHECK(f.points_dropped == 0);
}

TEST_CASE("fit_rate drops floor-dominated tail points") {
    const std::vector<std::pair<double, double>> pts{
        {4, 1.0 / 16}, {8, 1.0 / 64}, {16, 1.0 / 256}, {32, 1e-3}, {64, 1e-3 + 1e-6}};
    const RateFit f = fit_rate(pts, 1e-4);
    CHECK(f.points_dropped == 2);
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fit_rate(pts).points_dropped == 0);
    CHECK(fit_rate(pts, 1e-8).points_dropped == 0);
}

TEST_CASE("fit_rate input errors") {
    CHECK(code_of([] { fit_rate({{1, 1}, {2, 0.5}}); }) == Errc::InvalidInput);
    CHECK(code_of([] { fit_rate({{1, 1}, {2, 0.0}, {4, 0.1}}); }) == Errc::NonPositiveValue);
    CHECK(code_of([] { fit_rate({{2, 1}, {2, 0.5}, {2, 0.1}}); }) == Errc::InvalidInput);
}

TEST_CASE("sweep plan validation") {
    SweepPlan p;
    CHECK_NOTHROW(p.validate());
    p.c_values = {4, 8, 16};
    CHECK_THROWS_AS(p.validate(), Error);
    p.c_values = {4, 16, 8, 32};
    CHECK_THROWS_AS(p.validate(), Error);
    p = SweepPlan{};
    p.beta = 8.0;
    CHECK_THROWS_AS(p.validate(), Error);
    CHECK(parse_distance_kind(to_string(DistanceKind::L1pLinfx)) == DistanceKind::L1pLinfx);
    CHECK(parse_distance_kind("Linf-weighted") == DistanceKind::LinfWeighted);
    CHECK_THROWS_AS(parse_distance_kind("L2"), Error);
}

TEST_CASE("distances on hand-built fields") {
    const VelocityGrid g(5.0, 9);
    const auto n = EquilibriumSpec::newtonian_limit(10.0);
    DistField a = zeros(g, 8, n), b = zeros(g, 8, n);
    CHECK(distance_L1pLinfx(a, b, g) == 0.0);
    CHECK(distance_Linf_weighted(a, b, g, 10.0) == 0.0);

    const int centre = g.index(4, 4, 4);
    REQUIRE(centre >= 0);
    a.values(centre, 3) = 0.25;
    CHECK(distance_Linf_weighted(a, b, g, 10.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(distance_L1pLinfx(a, b, g) == doctest::Approx(0.25 * sqrt_gaussian({0, 0, 0}) * g.cell_volume()).epsilon(1e-14));
    CHECK(distance(DistanceKind::LinfWeighted, a, b, g, 10.0) == distance_Linf_weighted(a, b, g, 10.0));
    CHECK(code_of([&] { distance_L1pLinfx(a, zeros(g, 1, n), g); }) == Errc::GridMismatch);
}

TEST_CASE("zero perturbations: L1 distance is the equilibrium gap, O(c^-2)") {
    const VelocityGrid g(8.0, 17);
    const auto n = EquilibriumSpec::newtonian_limit(10.0);
    std::vector<std::pair<double, double>> pts;
    for (double c : {10.0, 20.0, 40.0, 80.0})
        pts.emplace_back(c, distance_L1pLinfx(zeros(g, 1, EquilibriumSpec::relativistic(c, 10.0)), zeros(g, 1, n), g));
    CHECK(fit_rate(pts).slope == doctest::Approx(-2.0).epsilon(0.02));
}

TEST_CASE("kernel sample set") {
    const auto s = kernel_sample_set(200, 3);
    REQUIRE(s.size() == 200);
    const auto t = kernel_sample_set(200, 3);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i].p.x == t[i].p.x);
        CHECK(norm(s[i].p) <= 5.0);
        CHECK(norm(s[i].q) <= 5.0);
        CHECK(norm(s[i].p - s[i].q) >= 0.5);
        CHECK(norm(s[i].omega) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("kernel, scattering map and velocity converge at rate c^-2") {
    const KernelSweep k = kernel_sweep({8, 16, 32, 64, 128}, kernel_sample_set(100));
    CHECK(k.kernel.slope == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(k.scatter.slope == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(k.velocity.slope == doctest::Approx(-2.0).epsilon(0.05));
}

TEST_CASE("spatial gradient of a single Fourier mode") {
    const VelocityGrid g(4.0, 7);
    const int nx = 6;
    const double L = 3.0, dx = L / nx, k = 2 * M_PI / L;
    DistField f = zeros(g, nx * nx * nx, EquilibriumSpec::newtonian_limit(10.0));
    double amp = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a) {
        const double v = std::exp(-norm2(g.center(a)));
        amp = std::max(amp, v * weight(g.center(a), 9.0));
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j)
                for (int l = 0; l < nx; ++l)
                    f.values(static_cast<Eigen::Index>(a), (i * nx + j) * nx + l) = v * std::sin(k * i * dx);
    }
    CHECK(grad_x_norm(f, g, nx, L, 10.0) == doctest::Approx(amp * std::sin(k * dx) / dx).epsilon(1e-13));
    DistField h = zeros(g, 1, f.regime);
    h.values.col(0) = f.values.col(0).array() + 1.0;
    CHECK(grad_x_norm(h, g, nx, L, 10.0) == 0.0);
    CHECK(grad_p_norm(zeros(g, 3, f.regime), g, 10.0) == 0.0);
    CHECK(code_of([&] { gradient_decay({f, f, f}, g, nx, L, 10.0); }) == Errc::InvalidInput);
}

TEST_CASE("velocity gradient of a linear function") {
    const VelocityGrid g(4.0, 9);
    DistField f = zeros(g, 1, EquilibriumSpec::newtonian_limit(10.0));
    for (std::size_t a = 0; a < g.size(); ++a) f.values(static_cast<Eigen::Index>(a), 0) = 2.0 * g.center(a).y;
    double wmax = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a) wmax = std::max(wmax, weight(g.center(a), 4.0));
    CHECK(grad_p_norm(f, g, 6.0) == doctest::Approx(2.0 * wmax).epsilon(1e-12));
}

TEST_CASE("small sweep and CSV roundtrip") {
    SolverConfig templ;
    templ.radius = 5.0;
    templ.n_v = 9;
    templ.dt = 0.01;
    SweepPlan plan;
    plan.sample_times = {0.1, 0.2};
    const SweepResult r = sweep(plan, templ);
    REQUIRE(r.error.empty());
    CHECK(r.distances.size() == 4 * 2 * 2);
    CHECK(r.summary.size() == 4);
    CHECK(r.floor > 0.0);
    for (const auto& s : r.summary) {
        CAPTURE(to_string(s.kind));
        CHECK(s.fit.slope < -1.5);
        CHECK(s.fit.slope > -2.5);
    }
    const std::string path = "relkin_test_sweep.csv";
    write_sweep_csv(path, r, "deadbeef");
    const auto back = summarize_sweep_csv(path);
    std::remove(path.c_str());
    REQUIRE(back.size() == r.summary.size());
    for (const auto& s : r.summary) {
        if (s.fit.points_dropped != 0) continue;
        int found = 0;
        for (const auto& b : back)
            if (b.kind == s.kind && b.t == s.t) {
                ++found;
                CHECK(b.fit.slope == doctest::Approx(s.fit.slope).epsilon(1e-9));
            }
        CHECK(found == 1);
    }
}
