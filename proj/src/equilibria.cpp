#include "relkin/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "relkin/error.hpp"
#include "relkin/kinematics.hpp"
#include "relkin/special_fn.hpp"

namespace relkin {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kLogGaussNorm = 1.5 * std::log(kTwoPi);

// log(4 pi c K2(c^2)) + c^2 = log(4 pi c e^{z} K2(z))
double log_juttner_norm(double c) { return std::log(4.0 * std::numbers::pi * c * bessel_k(2, c * c).scaled); }

struct NormCache {
    double c = -1.0;
    double log_norm = 0.0;
};

double cached_log_norm(double c) {
    thread_local NormCache cache;
    if (cache.c != c) {
        cache.c = c;
        cache.log_norm = log_juttner_norm(c);
    }
    return cache.log_norm;
}
}  // namespace

EquilibriumSpec EquilibriumSpec::relativistic(double c, double beta) {
    if (!(c >= 1.0) || !std::isfinite(c)) throw Error(Errc::InvalidInput, "light speed must be >= 1");
    return {false, c, beta};
}

EquilibriumSpec EquilibriumSpec::newtonian_limit(double beta) { return {true, 0.0, beta}; }

std::string EquilibriumSpec::label() const {
    if (newtonian) return "newtonian";
    std::ostringstream os;
    os.precision(17);
    os << c;
    return os.str();
}

Equilibrium::Equilibrium(const EquilibriumSpec& spec) : spec_(spec) {
    log_norm_ = spec.newtonian ? kLogGaussNorm : log_juttner_norm(spec.c);
}

double Equilibrium::log_value(const Vec3& p) const {
    if (spec_.newtonian) return -0.5 * norm2(p) - log_norm_;
    return juttner_exponent(p, spec_.c) - log_norm_;
}

double Equilibrium::value(const Vec3& p) const { return std::exp(log_value(p)); }
double Equilibrium::sqrt_value(const Vec3& p) const { return std::exp(0.5 * log_value(p)); }

double Equilibrium::energy_invariant(const Vec3& p) const {
    return spec_.newtonian ? norm2(p) : energy(p, spec_.c);
}

double juttner_exponent(const Vec3& p, double c) {
    double p2 = norm2(p);
    return -p2 / (1.0 + std::sqrt(1.0 + p2 / (c * c)));
}

double juttner(const Vec3& p, double c) { return std::exp(juttner_exponent(p, c) - cached_log_norm(c)); }
double sqrt_juttner(const Vec3& p, double c) { return std::exp(0.5 * (juttner_exponent(p, c) - cached_log_norm(c))); }
double gaussian(const Vec3& p) { return std::exp(-0.5 * norm2(p) - kLogGaussNorm); }
double sqrt_gaussian(const Vec3& p) { return std::exp(0.5 * (-0.5 * norm2(p) - kLogGaussNorm)); }
double weight(const Vec3& p, double beta) { return std::pow(1.0 + norm2(p), 0.5 * beta); }

double equilibrium_radius(double c) { return std::max(12.0, 40.0 / c + 10.0); }

VelocityGrid default_moment_grid(double c) {
    double r = equilibrium_radius(c);
    int n = static_cast<int>(std::ceil(2.0 * r / 0.4));
    if (n % 2 == 0) ++n;
    return VelocityGrid(r, n);
}

ClosedMoments closed_form_moments(double c) {
    const double r = bessel_ratio_32(c * c);
    const double c2 = c * c;
    ClosedMoments m;
    m.a[1] = r;
    m.a[2] = c2 + 3.0 * r;
    m.a[3] = c * r - 1.0 / c;
    m.a[4] = 1.0 / c;
    m.a[5] = c + 5.0 / c * r;
    m.a[6] = 5.0 / c * r;
    m.a[7] = r / c;
    m.a[8] = 7.0 / c + 42.0 / (c2 * c) * r;
    m.a[9] = 3.0 / c * r;
    m.a[10] = 5.0 + 30.0 / c2 * r;
    // A2 - A3^2 = c^2 (1 - r^2) + 5 r - 1/c^2 with r - 1 formed directly
    const double d = bessel_ratio_32_minus_one(c2);
    m.kinetic_mean = (c2 * d - 1.0) / c;
    if (c2 < 1e3) {
        m.variance = 5.0 + 5.0 * d - c2 * d * (2.0 + d) - 1.0 / c2;
    } else {
        // the closed form cancels to ~3/(2c^2); large-argument expansion in w = 1/c^2
        static constexpr double coef[] = {1.5,           3.75,        -5.625,           4.21875,     7.03125,
                                          -43.505859375, 147.65625,   -465.216064453125, 1601.806640625};
        const double w = 1.0 / c2;
        double v = 0.0;
        for (int k = 8; k >= 0; --k) v = (v + coef[k]) * w;
        m.variance = v;
    }
    return m;
}

double MomentTable::max_gap() const {
    double g = 0.0;
    for (const auto& e : entries) g = std::max(g, e.rel_gap);
    return g;
}

MomentTable moments(double c, const VelocityGrid& grid) {
    ClosedMoments cf = closed_form_moments(c);
    const double log_norm = cached_log_norm(c);
    long double acc[11] = {};
    const double vol = grid.cell_volume();
    const int n = grid.n_per_axis();
    // plane-by-plane partial sums, combined in lattice order
    for (int i = 0; i < n; ++i) {
        long double plane[11] = {};
        const double x = grid.coord(i);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (!grid.in_ball(i, j, k)) continue;
                const Vec3 p{x, grid.coord(j), grid.coord(k)};
                const double jv = std::exp(juttner_exponent(p, c) - log_norm);
                const double p0 = energy(p, c);
                const double p2 = norm2(p);
                const double xi = p.x * p.x, xk = p.y * p.y;
                plane[0] += jv;
                plane[1] += xi * jv;
                plane[2] += p0 * p0 * jv;
                plane[3] += p0 * jv;
                plane[4] += xi / p0 * jv;
                plane[5] += xi * p0 * jv;
                plane[6] += xi * p2 / p0 * jv;
                plane[7] += xi * xk / p0 * jv;
                plane[8] += p2 * xi * xk / p0 * jv;
                plane[9] += xi * xi / p0 * jv;
                plane[10] += xi * p2 * jv;
            }
        for (int m = 0; m < 11; ++m) acc[m] += plane[m];
    }
    MomentTable t;
    t.c = c;
    for (int m = 1; m <= 10; ++m) {
        MomentEntry e;
        e.name = "A" + std::to_string(m);
        e.closed_form = cf.a[m];
        e.quadrature = static_cast<double>(acc[m]) * vol;
        e.rel_gap = std::abs(e.quadrature - e.closed_form) / std::abs(e.closed_form);
        t.entries.push_back(e);
    }
    if (t.max_gap() > 1e-4) throw Error(Errc::GridTooCoarse, "moments: quadrature gap above 1e-4");
    return t;
}

MomentTable moments(double c) { return moments(c, default_moment_grid(c)); }

namespace {
// log(rho) where J_c = mu * rho * exp(delta), rho = (2 pi)^{3/2} / (4 pi c K2(c^2))
double log_rho(double c) {
    double d = bessel_k_unit_minus_one(2, c * c);
    return -std::log1p(d);
}
// delta = c^2 - c p0 + |p|^2/2 = |p|^4 / (2 (c + p0)^2)
double delta_exponent(const Vec3& p, double c) {
    double p2 = norm2(p);
    double cp = c + energy(p, c);
    return p2 * p2 / (2.0 * cp * cp);
}
}  // namespace

double juttner_minus_gaussian(const Vec3& p, double c) {
    return gaussian(p) * std::expm1(delta_exponent(p, c) + log_rho(c));
}

double sqrt_juttner_minus_gaussian(const Vec3& p, double c) {
    return sqrt_gaussian(p) * std::expm1(0.5 * (delta_exponent(p, c) + log_rho(c)));
}

MaxwellianGap maxwellian_gap(double c, double beta, const std::vector<Vec3>& sample) {
    (void)beta;
    const double lr = log_rho(c);
    MaxwellianGap g;
    for (const Vec3& p : sample) {
        const double d = delta_exponent(p, c) + lr;
        const double r = norm(p);
        g.plain = std::max(g.plain, std::exp(0.5 * r) * gaussian(p) * std::abs(std::expm1(d)));
        g.root = std::max(g.root, std::exp(0.25 * r) * sqrt_gaussian(p) * std::abs(std::expm1(0.5 * d)));
    }
    return g;
}

Eigen::MatrixXd macro_basis(const EquilibriumSpec& spec, const VelocityGrid& grid) {
    Equilibrium eq(spec);
    double a1 = 1.0, a3 = 3.0, var = 6.0;
    if (!spec.newtonian) {
        ClosedMoments cf = closed_form_moments(spec.c);
        a1 = cf.a[1];
        a3 = cf.kinetic_mean;
        var = cf.variance;
    }
    if (!(var > 0.0)) throw Error(Errc::InvalidInput, "macro_basis: non-positive energy variance");
    const double s1 = 1.0 / std::sqrt(a1), s4 = 1.0 / std::sqrt(var);
    const std::size_t n = grid.size();
    Eigen::MatrixXd e(n, 5);
    for (std::size_t a = 0; a < n; ++a) {
        const Vec3& p = grid.center(a);
        const double sq = eq.sqrt_value(p);
        e(a, 0) = sq;
        e(a, 1) = p.x * s1 * sq;
        e(a, 2) = p.y * s1 * sq;
        e(a, 3) = p.z * s1 * sq;
        const double en = spec.newtonian ? norm2(p) : kinetic_energy(p, spec.c);
        e(a, 4) = (en - a3) * s4 * sq;
    }
    return e;
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& basis, const VelocityGrid& grid) {
    return (basis.transpose() * basis) * grid.cell_volume();
}

}  // namespace relkin
