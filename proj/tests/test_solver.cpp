#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <algorithm>
#include <numeric>

#include "relkin/error.hpp"
#include "relkin/solver.hpp"

using namespace relkin;

namespace {

SolverConfig small(const EquilibriumSpec& spec) {
    SolverConfig c;
    c.regime = spec;
    c.radius = 5.0;
    c.n_v = 9;
    c.dt = 0.01;
    c.t_end = 0.5;
    return c;
}

template <class F>
Errc code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no relkin::Error thrown");
    return Errc::InvalidInput;
}

}  // namespace

TEST_CASE("zero data stays zero") {
    SolverConfig cfg = small(EquilibriumSpec::newtonian_limit(10.0));
    cfg.init.amplitude = 0.0;
    const RunResult r = run(cfg);
    REQUIRE(r.series.size() == 51);
    for (const auto& s : r.series) {
        CHECK(s.sup_norm == 0.0);
        for (double m : s.moments) CHECK(m == 0.0);
    }
}

TEST_CASE("zero-mean data has vanishing conserved moments") {
    for (const auto& spec : {EquilibriumSpec::newtonian_limit(10.0), EquilibriumSpec::relativistic(4.0, 10.0)}) {
        SolverConfig cfg = small(spec);
        cfg.conservation_fixup = true;
        const RunResult r = run(cfg);
        for (const auto& s : r.series)
            for (double m : s.moments) CHECK(std::abs(m) < 1e-14);
        CHECK(r.series.back().sup_norm < r.series.front().sup_norm);
        CHECK(r.negative_cells == 0);
    }
}

TEST_CASE("moment drift without the fixup is small but nonzero") {
    SolverConfig cfg = small(EquilibriumSpec::newtonian_limit(10.0));
    const RunResult r = run(cfg);
    double drift = 0.0;
    for (const auto& s : r.series)
        for (double m : s.moments) drift = std::max(drift, std::abs(m));
    CHECK(drift < 1e-3 * r.series.front().sup_norm);
}

TEST_CASE("time stepping is second order") {
    SolverConfig cfg = small(EquilibriumSpec::relativistic(4.0, 10.0));
    cfg.init.zero_mean_projection = false;
    auto ops = std::make_shared<const SolverOperators>(cfg.regime, cfg.grid());
    auto final_at = [&](double dt) {
        SolverConfig c = cfg;
        c.dt = dt;
        return run(c, ops).final_state.values;
    };
    const Eigen::MatrixXd ref = final_at(0.00125);
    const double e1 = (final_at(0.01) - ref).cwiseAbs().maxCoeff();
    const double e2 = (final_at(0.005) - ref).cwiseAbs().maxCoeff();
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("periodic run of x-independent data matches the homogeneous run") {
    SolverConfig hom = small(EquilibriumSpec::relativistic(6.0, 10.0));
    hom.t_end = 0.2;
    auto ops = std::make_shared<const SolverOperators>(hom.regime, hom.grid());
    const DistField f0 = build_initial(hom, *ops);
    SolverConfig per = hom;
    per.spatial = SpatialMode::Periodic;
    per.n_x = 4;
    DistField g0 = f0;
    g0.values = f0.values.replicate(1, 64);
    const Eigen::MatrixXd a = run(hom, ops, &f0).final_state.values;
    const Eigen::MatrixXd b = run(per, ops, &g0).final_state.values;
    for (Eigen::Index x = 0; x < b.cols(); ++x) CHECK((b.col(x) - a.col(0)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("periodic shift") {
    const int n = 6;
    const double dx = 0.5;
    std::vector<double> in(n * n * n), out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = std::sin(0.7 * static_cast<double>(i)) + 2.0;
    const double mass = std::accumulate(in.begin(), in.end(), 0.0);

    periodic_shift(in.data(), out.data(), n, dx, {0, 0, 0});
    CHECK(out == in);
    periodic_shift(in.data(), out.data(), n, dx, {n * dx, -2 * n * dx, 0});
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(out[i] == doctest::Approx(in[i]).epsilon(1e-14));

    // one cell along z moves index k to k+1
    periodic_shift(in.data(), out.data(), n, dx, {0, 0, dx});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                CHECK(out[(i * n + j) * n + (k + 1) % n] == doctest::Approx(in[(i * n + j) * n + k]).epsilon(1e-14));

    periodic_shift(in.data(), out.data(), n, dx, {0.13, -0.71, 2.2});
    CHECK(std::accumulate(out.begin(), out.end(), 0.0) == doctest::Approx(mass).epsilon(1e-13));
    CHECK(*std::min_element(out.begin(), out.end()) >= *std::min_element(in.begin(), in.end()));
}

TEST_CASE("decay slope of an exact exponential") {
    std::vector<TimeSample> s;
    for (int i = 0; i <= 20; ++i) {
        TimeSample t;
        t.t = 0.1 * i;
        t.sup_norm = 3.0 * std::exp(-2.0 * t.t);
        s.push_back(t);
    }
    CHECK(decay_slope(s, 0.0, 2.0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(code_of([&] { decay_slope(s, 5.0, 6.0); }) == Errc::InvalidInput);
}

TEST_CASE("solver input errors") {
    SolverConfig cfg = small(EquilibriumSpec::newtonian_limit(10.0));
    cfg.init.amplitude = -50.0;
    cfg.init.zero_mean_projection = false;
    CHECK(code_of([&] { run(cfg); }) == Errc::NegativeDensity);

    cfg = small(EquilibriumSpec::newtonian_limit(10.0));
    cfg.dt = 0.2;
    CHECK(code_of([&] { run(cfg); }) == Errc::InvalidInput);

    cfg = small(EquilibriumSpec::newtonian_limit(10.0));
    auto ops = std::make_shared<const SolverOperators>(cfg.regime, VelocityGrid(5.0, 7));
    CHECK(code_of([&] { run(cfg, ops); }) == Errc::GridMismatch);
}
