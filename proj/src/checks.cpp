#include "relkin/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "relkin/collision.hpp"
#include "relkin/csv.hpp"
#include "relkin/equilibria.hpp"
#include "relkin/error.hpp"
#include "relkin/kinematics.hpp"
#include "relkin/linear_ops.hpp"
#include "relkin/special_fn.hpp"

namespace relkin {

Thresholds Thresholds::defaults() {
    Thresholds t;
    t.tol = {
        {"kin.gs.momentum", 1e-11},  {"kin.gs.energy", 1e-11},   {"kin.gs.mass_shell", 1e-10},
        {"kin.com.momentum", 1e-11}, {"kin.com.energy", 1e-11},  {"kin.com.mass_shell", 1e-10},
        {"jac.residual", 1e-5},      {"bessel.recurrence", 1e-9}, {"moments.gap", 1e-6},
        {"lin.gram", 1e-6},          {"lin.residual", 1e-3},     {"lin.symmetry", 1e-8},
        {"lin.coercivity_ratio", 3}, {"gamma.refinement", 4},    {"gamma.bound_ratio", 2},
        {"decay.drift", 1e-8},       {"decay.uniformity", 3},    {"grad.p_ratio", 5},
    };
    t.band = {
        {"jacobian_order", {1.8, 2.2}}, {"bessel_remainder", {-3.3, -2.7}}, {"maxwellian_gap", {-2.2, -1.8}},
        {"kernel", {-2.1, -1.9}},       {"sweep", {-2.3, -1.6}},
    };
    return t;
}

double Thresholds::at(const std::string& id) const {
    const auto it = tol.find(id);
    if (it == tol.end()) throw Error(Errc::Config, "unknown tolerance '" + id + "'");
    return it->second;
}

std::pair<double, double> Thresholds::band_at(const std::string& name) const {
    const auto it = band.find(name);
    if (it == band.end()) throw Error(Errc::Config, "unknown band '" + name + "'");
    return it->second;
}

CheckSettings::CheckSettings() {
    solver.regime = EquilibriumSpec::newtonian_limit(10.0);
    periodic.spatial = SpatialMode::Periodic;
    periodic.regime = EquilibriumSpec::relativistic(16.0, 10.0);
    periodic.n_x = 8;
    periodic.radius = 6.0;
    periodic.n_v = 15;
    periodic.length = 3.141592653589793;
    periodic.t_end = 3.0;
}

namespace {

CheckRow upper(const std::string& id, const std::string& anchor, double measured, double tol) {
    return {id, anchor, measured <= tol, measured, "<= " + fmt_double(tol)};
}

CheckRow lower(const std::string& id, const std::string& anchor, double measured, double tol) {
    return {id, anchor, measured >= tol, measured, ">= " + fmt_double(tol)};
}

CheckRow positive(const std::string& id, const std::string& anchor, double measured) {
    return {id, anchor, measured > 0.0, measured, "> 0"};
}

CheckRow negative(const std::string& id, const std::string& anchor, double measured) {
    return {id, anchor, measured < 0.0, measured, "< 0"};
}

CheckRow in_band(const std::string& id, const std::string& anchor, double measured, std::pair<double, double> b) {
    return {id, anchor, measured >= b.first && measured <= b.second, measured,
            "in [" + fmt_double(b.first) + ", " + fmt_double(b.second) + "]"};
}

std::string regime_tag(const EquilibriumSpec& s) { return s.newtonian ? "newton" : "c" + fmt_double(s.c); }

struct Sampler {
    std::mt19937_64 rng;
    explicit Sampler(unsigned seed) : rng(seed) {}
    double unit() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }
    Vec3 ball(double r) {
        for (;;) {
            const Vec3 v{2 * unit() - 1, 2 * unit() - 1, 2 * unit() - 1};
            if (norm2(v) <= 1.0) return v * r;
        }
    }
    Vec3 sphere() {
        for (;;) {
            const Vec3 v = ball(1.0);
            const double n = norm(v);
            if (n > 0.1) return v / n;
        }
    }
    double log_uniform(double a, double b) { return a * std::exp(unit() * std::log(b / a)); }
};

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
    return out;
}

}  // namespace

std::vector<CheckRow> check_kinematics(const CheckSettings& s) {
    Sampler rng(s.seed);
    double gm = 0, ge = 0, gs = 0, cm = 0, ce = 0, cs = 0;
    for (std::size_t n = 0; n < s.kinematic_samples; ++n) {
        const double c = rng.log_uniform(1.0, 100.0);
        const Vec3 p = rng.ball(5.0), q = rng.ball(5.0), w = rng.sphere();
        const double mom = norm(p) + norm(q), en = energy(p, c) + energy(q, c);
        auto measure = [&](const ScatterEvent& e, double& m, double& E, double& shell) {
            if (mom > 0.0) m = std::max(m, norm(e.p_out + e.q_out - p - q) / mom);
            E = std::max(E, std::abs(e.p_out0 + e.q_out0 - en) / en);
            shell = std::max({shell, std::abs(e.p_out0 - energy(e.p_out, c)) / energy(e.p_out, c),
                              std::abs(e.q_out0 - energy(e.q_out, c)) / energy(e.q_out, c)});
        };
        measure(scatter_gs(p, q, w, c), gm, ge, gs);
        measure(scatter_com(p, q, w, c), cm, ce, cs);
    }
    const auto& t = s.thresholds;
    const std::string a = "scattering conserves momentum and energy";
    const std::string b = "post-collision momenta on the mass shell";
    return {upper("kin.gs.momentum", a, gm, t.at("kin.gs.momentum")),
            upper("kin.gs.energy", a, ge, t.at("kin.gs.energy")),
            upper("kin.gs.mass_shell", b, gs, t.at("kin.gs.mass_shell")),
            upper("kin.com.momentum", a, cm, t.at("kin.com.momentum")),
            upper("kin.com.energy", a, ce, t.at("kin.com.energy")),
            upper("kin.com.mass_shell", b, cs, t.at("kin.com.mass_shell"))};
}

std::vector<CheckRow> check_jacobian(const CheckSettings& s) {
    Sampler rng(s.seed + 1);
    double worst = 0, r1 = 0, r2 = 0;
    for (std::size_t n = 0; n < s.jacobian_samples; ++n) {
        const double c = rng.log_uniform(1.0, 100.0);
        const Vec3 p = rng.ball(5.0), q = rng.ball(5.0), w = rng.sphere();
        worst = std::max(worst, jacobian_residual(p, q, w, c));
        r1 += jacobian_residual(p, q, w, c, 2e-3);
        r2 += jacobian_residual(p, q, w, c, 1e-3);
    }
    const std::string a = "Glassey-Strauss map Jacobian equals -p'0 q'0/(p0 q0)";
    return {upper("jac.residual", a, worst, s.thresholds.at("jac.residual")),
            in_band("jac.order", "finite-difference residual is second order in the step", std::log2(r1 / r2),
                    s.thresholds.band_at("jacobian_order"))};
}

std::vector<CheckRow> check_bessel(const CheckSettings& s) {
    double rec = 0.0;
    bool above_one = true;
    for (double z : logspace(0.5, 200.0, 120)) {
        for (int j = 1; j <= 4; ++j) {
            const double km = bessel_k(j - 1, z).scaled, k0 = bessel_k(j, z).scaled, kp = bessel_k(j + 1, z).scaled;
            rec = std::max(rec, std::abs(kp - km - 2.0 * j / z * k0) / kp);
        }
        above_one = above_one && bessel_ratio_32(z) > 1.0;
    }
    std::vector<std::pair<double, double>> pts;
    for (double z : {25.0, 50.0, 100.0, 200.0}) {
        const double rem = bessel_ratio_32_minus_one(z) - 2.5 / z - 15.0 / (8.0 * z * z);
        pts.emplace_back(z, std::abs(rem));
    }
    const RateFit fit = fit_rate(pts);
    return {upper("bessel.recurrence", "K_{j+1} = K_{j-1} + (2j/z) K_j", rec, s.thresholds.at("bessel.recurrence")),
            in_band("bessel.remainder_slope", "K3/K2 - 1 - 5/(2z) - 15/(8z^2) = O(z^-3)", fit.slope,
                    s.thresholds.band_at("bessel_remainder")),
            {"bessel.ratio_above_one", "K3/K2 > 1", above_one, above_one ? 1.0 : 0.0, "== 1"}};
}

std::vector<CheckRow> check_moments(const CheckSettings& s) {
    std::vector<CheckRow> rows;
    for (double c : {1.0, 2.0, 5.0, 10.0})
        rows.push_back(upper("moments.gap.c" + fmt_double(c), "closed-form moments match grid quadrature",
                             moments(c).max_gap(), s.thresholds.at("moments.gap")));
    double vmin = INFINITY;
    for (double c : logspace(0.5, 100.0, 60)) vmin = std::min(vmin, closed_form_moments(c).variance * c * c);
    rows.push_back(positive("moments.variance", "A2 - A3^2 > 0 (scaled by c^2, minimum over c)", vmin));
    return rows;
}

std::vector<CheckRow> check_maxwellian_gap(const CheckSettings& s) {
    std::vector<Vec3> sample;
    for (int i = 0; i <= 2000; ++i) sample.push_back({0.015 * i, 0.0, 0.0});
    std::vector<std::pair<double, double>> plain, root;
    for (double c : {4.0, 8.0, 16.0, 32.0, 64.0}) {
        const MaxwellianGap g = maxwellian_gap(c, 0.0, sample);
        plain.emplace_back(c, g.plain);
        root.emplace_back(c, g.root);
    }
    const auto band = s.thresholds.band_at("maxwellian_gap");
    return {in_band("gap.plain_slope", "sup e^{|p|/2}|J_c - mu| ~ c^-2", fit_rate(plain).slope, band),
            in_band("gap.root_slope", "sup e^{|p|/4}|sqrt J_c - sqrt mu| ~ c^-2", fit_rate(root).slope, band)};
}

std::vector<CheckRow> check_kernel_rates(const CheckSettings& s) {
    const KernelSweep k = kernel_sweep({4, 8, 16, 32, 64}, kernel_sample_set(400, s.seed));
    const auto band = s.thresholds.band_at("kernel");
    return {in_band("rates.kernel", "|k_c - k_inf| ~ c^-2", k.kernel.slope, band),
            in_band("rates.scatter", "|p'_c - p'_inf| ~ c^-2", k.scatter.slope, band),
            in_band("rates.velocity", "|p - p_hat| ~ c^-2", k.velocity.slope, band)};
}

std::vector<CheckRow> check_linear_operator(const CheckSettings& s) {
    const auto& t = s.thresholds;
    std::vector<CheckRow> rows;
    std::vector<EquilibriumSpec> regimes{EquilibriumSpec::newtonian_limit()};
    for (double c : {2.0, 5.0, 20.0, 50.0}) regimes.push_back(EquilibriumSpec::relativistic(c));

    for (const auto& spec : regimes) {
        const VelocityGrid g = default_moment_grid(spec.newtonian ? 100.0 : spec.c);
        const Eigen::MatrixXd G = gram(macro_basis(spec, g), g);
        const double dev = (G - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff();
        rows.push_back(upper("lin.gram." + regime_tag(spec), "e0..e4 orthonormal", dev, t.at("lin.gram")));
    }

    NuQuadrature quad;
    quad.omega_polar = s.omega_order;
    quad.omega_azimuth = 2 * s.omega_order;
    for (const auto& spec : {EquilibriumSpec::newtonian_limit(), EquilibriumSpec::relativistic(5.0)}) {
        double res[2];
        for (int lev = 0; lev < 2; ++lev) {
            const VelocityGrid g(s.operator_radius, lev == 0 ? s.residual_n_coarse : s.residual_n_fine);
            const Eigen::VectorXd nu = nu_on_grid(spec, g, quad);
            const Eigen::MatrixXd e = macro_basis(spec, g);
            const Eigen::MatrixXd Le = nu.asDiagonal() * e - apply_K_free(spec, g, e, {}, &nu);
            res[lev] = 0.0;
            for (int i = 0; i < 5; ++i) res[lev] = std::max(res[lev], Le.col(i).norm() / e.col(i).norm());
        }
        const std::string tag = regime_tag(spec);
        rows.push_back(upper("lin.residual." + tag, "||L e_i||/||e_i|| (finer grid)", res[1], t.at("lin.residual")));
        rows.push_back({"lin.residual_shrinks." + tag, "L e_i residual decreases under refinement", res[1] < res[0],
                        res[1] / res[0], "< 1"});
    }

    std::vector<double> zeta;
    for (std::size_t r = 1; r < regimes.size(); ++r) {
        const auto& spec = regimes[r];
        const LinearOperator op(spec, VelocityGrid(s.operator_radius, s.operator_n), quad);
        const Eigen::MatrixXd& K = op.K();
        const double defect = (K - K.transpose()).cwiseAbs().maxCoeff() / K.cwiseAbs().maxCoeff();
        rows.push_back(upper("lin.symmetry." + regime_tag(spec), "K is self-adjoint", defect, t.at("lin.symmetry")));
        zeta.push_back(coercivity(op));
        rows.push_back(positive("lin.coercivity." + regime_tag(spec), "<Lg,g> >= zeta <nu g,g> off the null space",
                                zeta.back()));
    }
    const auto [mn, mx] = std::minmax_element(zeta.begin(), zeta.end());
    rows.push_back(upper("lin.coercivity_ratio", "coercivity constant uniform in c", *mx / *mn,
                         t.at("lin.coercivity_ratio")));
    return rows;
}

namespace {

struct GammaResiduals {
    double annihilation;
    double invariants;
};

// Residuals of Gamma at the coarse-grid centres, on the grid (R, n) or its
// exact halving, with the omega rule doubled alongside.
GammaResiduals gamma_residuals(const EquilibriumSpec& spec, double radius, int n, bool fine) {
    const VelocityGrid coarse(radius, n);
    const VelocityGrid g = fine ? VelocityGrid(radius * (2 * n + 1) / (2.0 * n), 2 * n + 1) : coarse;
    CollisionQuadrature q = CollisionQuadrature::make(fine ? 4 : 2, fine ? 8 : 4);
    q.interpolation = Interpolation::Tricubic;
    const Equilibrium eq(spec);
    Eigen::VectorXd sq(g.size()), h(g.size());
    for (std::size_t a = 0; a < g.size(); ++a) {
        const Vec3& p = g.center(a);
        const auto i = static_cast<Eigen::Index>(a);
        sq(i) = eq.sqrt_value(p);
        h(i) = sq(i) * (0.3 + p.x - 0.2 * p.y * p.y) * std::exp(-0.1 * norm2(p));
    }
    const std::vector<Vec3>& pts = coarse.centers();
    const GammaResult a = gamma(spec, g, sq, sq, q, &pts);
    GammaResiduals out;
    out.annihilation = a.total().cwiseAbs().maxCoeff() / a.loss.cwiseAbs().maxCoeff();
    const GammaResult b = gamma(spec, g, h, h, q, &pts);
    const Eigen::VectorXd tot = b.total();
    double inv[5] = {0, 0, 0, 0, 0}, scale = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const Vec3& p = pts[k];
        const auto i = static_cast<Eigen::Index>(k);
        const double w = eq.sqrt_value(p) * coarse.cell_volume();
        const double en = spec.newtonian ? norm2(p) : kinetic_energy(p, spec.c);
        const double psi[5] = {1.0, p.x, p.y, p.z, en};
        for (int j = 0; j < 5; ++j) inv[j] += tot(i) * w * psi[j];
        scale += std::abs(b.loss(i)) * w * (1.0 + norm(p) + en);
    }
    out.invariants = 0.0;
    for (double v : inv) out.invariants = std::max(out.invariants, std::abs(v) / scale);
    return out;
}

}  // namespace

std::vector<CheckRow> check_collision(const CheckSettings& s) {
    const auto& t = s.thresholds;
    std::vector<CheckRow> rows;
    for (const auto& spec : {EquilibriumSpec::newtonian_limit(), EquilibriumSpec::relativistic(10.0)}) {
        const GammaResiduals c = gamma_residuals(spec, 5.0, 9, false), f = gamma_residuals(spec, 5.0, 9, true);
        const std::string tag = regime_tag(spec);
        rows.push_back(lower("gamma.annihilation." + tag, "Gamma(sqrt J, sqrt J) = 0; coarse/fine residual",
                             c.annihilation / f.annihilation, t.at("gamma.refinement")));
        rows.push_back(lower("gamma.invariants." + tag, "<Gamma(h,h), psi> = 0; coarse/fine residual",
                             c.invariants / f.invariants, t.at("gamma.refinement")));
    }

    const double beta = 5.0;
    std::vector<double> ratios;
    auto bound = [&](const EquilibriumSpec& spec, const VelocityGrid& g) {
        CollisionQuadrature q = CollisionQuadrature::make(4, 8);
        q.interpolation = Interpolation::Tricubic;
        Eigen::VectorXd h(g.size());
        for (std::size_t a = 0; a < g.size(); ++a) h(static_cast<Eigen::Index>(a)) = 1.0 / weight(g.center(a), beta);
        const Eigen::VectorXd nu = nu_on_grid(spec, g);
        return gamma_bound_check(h, h, spec, beta, g, q, g.centers(), nu).ratio;
    };
    for (double c : {2.0, 10.0, 50.0}) {
        const EquilibriumSpec spec = EquilibriumSpec::relativistic(c);
        ratios.push_back(bound(spec, VelocityGrid(5.0, 9)));
        rows.push_back({"gamma.bound.c" + fmt_double(c), "||nu^-1 w Gamma(h,h)|| <= C ||w h||^2; ratio finite",
                        std::isfinite(ratios.back()) && ratios.back() > 0.0, ratios.back(), "finite, > 0"});
    }
    const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
    rows.push_back(upper("gamma.bound_spread", "bound ratio stable across c", *mx / *mn, t.at("gamma.bound_ratio")));
    const double refined = bound(EquilibriumSpec::relativistic(10.0), VelocityGrid(5.0 * 19.0 / 18.0, 19));
    const double spread = std::max(refined / ratios[1], ratios[1] / refined);
    rows.push_back(upper("gamma.bound_refinement", "bound ratio stable under refinement (c = 10)", spread,
                         t.at("gamma.bound_ratio")));
    return rows;
}

std::vector<CheckRow> check_decay(const CheckSettings& s) {
    const auto& t = s.thresholds;
    std::vector<CheckRow> rows;
    std::vector<double> rates;
    std::vector<EquilibriumSpec> regimes;
    for (double c : {4.0, 16.0, 64.0}) regimes.push_back(EquilibriumSpec::relativistic(c, s.solver.beta()));
    regimes.push_back(EquilibriumSpec::newtonian_limit(s.solver.beta()));
    for (const auto& spec : regimes) {
        SolverConfig cfg = s.solver;
        cfg.regime = spec;
        cfg.conservation_fixup = false;
        const RunResult r = run(cfg);
        double drift = 0.0;
        for (const auto& ts : r.series)
            for (int i = 0; i < 5; ++i) drift = std::max(drift, std::abs(ts.moments[i] - r.series.front().moments[i]));
        const std::string tag = regime_tag(spec);
        rows.push_back(upper("decay.drift." + tag, "conserved moments drift per unit time (no fixup)",
                             drift / cfg.t_end, t.at("decay.drift")));
        rates.push_back(decay_slope(r.series, 0.0, cfg.t_end));
        rows.push_back(negative("decay.slope." + tag, "||w f(t)||_inf decays exponentially", rates.back()));
        rows.push_back({"decay.positivity." + tag, "J + sqrt(J) f stays nonnegative", r.negative_cells == 0,
                        static_cast<double>(r.negative_cells), "== 0"});
    }
    double mn = INFINITY, mx = 0.0;
    for (double r : rates) {
        mn = std::min(mn, std::abs(r));
        mx = std::max(mx, std::abs(r));
    }
    rows.push_back(upper("decay.uniformity", "decay rates uniform in c (max/min)", mx / mn, t.at("decay.uniformity")));
    return rows;
}

std::vector<CheckRow> check_newtonian_limit(const CheckSettings& s) {
    const SweepResult r = sweep(s.sweep, s.solver);
    std::vector<CheckRow> rows;
    if (!r.error.empty())
        rows.push_back({"limit.sweep", "sweep completed: " + r.error, false, 0.0, "no error"});
    const auto band = s.thresholds.band_at("sweep");
    for (const auto& sum : r.summary)
        rows.push_back(in_band("limit.slope." + to_string(sum.kind) + ".t" + fmt_double(sum.t),
                               "distance to the Newtonian solution ~ c^-2", sum.fit.slope, band));
    const auto& times = s.sweep.sample_times;
    const double t_early = *std::min_element(times.begin(), times.end());
    const double t_late = *std::max_element(times.begin(), times.end());
    for (DistanceKind k : s.sweep.kinds) {
        double worst = 0.0;
        for (const auto& a : r.distances) {
            if (a.kind != k || a.t != t_late) continue;
            for (const auto& b : r.distances)
                if (b.kind == k && b.c == a.c && b.t == t_early) worst = std::max(worst, a.value / b.value);
        }
        rows.push_back(upper("limit.later_smaller." + to_string(k),
                             "distance at t=" + fmt_double(t_late) + " over distance at t=" + fmt_double(t_early) +
                                 " (max over c)",
                             worst, 1.0));
    }
    return rows;
}

std::vector<CheckRow> check_regularity(const CheckSettings& s) {
    SolverConfig cfg = s.periodic;
    cfg.snapshot_times.clear();
    for (int i = 0; i <= 8; ++i) cfg.snapshot_times.push_back(cfg.t_end * i / 8.0);
    const RunResult r = run(cfg);
    const GradientReport g = gradient_decay(r.snapshots, cfg.grid(), cfg.n_x, cfg.length, cfg.beta());
    return {negative("grad.x_slope", "||w_{beta-1} grad_x f||_inf decays", g.x_slope),
            upper("grad.p_ratio", "||w_{beta-2} grad_p f||_inf stays bounded (max/initial)", g.p_ratio,
                  s.thresholds.at("grad.p_ratio"))};
}

std::vector<CheckRow> verify_suite(const CheckSettings& s) {
    std::vector<CheckRow> rows;
    for (auto* fn : {check_kinematics, check_jacobian, check_bessel, check_moments, check_maxwellian_gap,
                     check_kernel_rates, check_linear_operator, check_collision}) {
        auto part = fn(s);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

bool all_pass(const std::vector<CheckRow>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

void write_check_csv(const std::string& path, const std::vector<CheckRow>& rows, const std::string& hash) {
    CsvWriter w(path, hash, {"check_id", "anchor", "status", "measured", "threshold"});
    for (const auto& r : rows) w.row({r.id, r.anchor, r.pass ? "PASS" : "FAIL", fmt_double(r.measured), r.threshold});
    w.commit();
}

}  // namespace relkin
