#include "relkin/collision.hpp"

#include <cmath>
#include <numbers>

#include "relkin/error.hpp"
#include "relkin/kinematics.hpp"

namespace relkin {

namespace {

struct QCell {
    Vec3 q;
    double q0 = 0.0;
    double weight = 0.0;  // sqrt(J(q)) * cell measure
    std::size_t index = 0;
};

std::vector<QCell> q_cells(const EquilibriumSpec& spec, const VelocityGrid& grid, const CollisionQuadrature& quad) {
    if (quad.q_stride < 1) throw Error(Errc::InvalidInput, "collision quadrature: q_stride must be >= 1");
    const Equilibrium eq(spec);
    const int n = grid.n_per_axis(), half = n / 2, s = quad.q_stride;
    const double vol = grid.cell_volume() * s * s * s;
    std::vector<QCell> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if ((i - half) % s != 0 || (j - half) % s != 0 || (k - half) % s != 0) continue;
                const int a = grid.index(i, j, k);
                if (a < 0) continue;
                const Vec3& q = grid.center(static_cast<std::size_t>(a));
                if (norm(q) > quad.q_cutoff) continue;
                QCell c;
                c.q = q;
                c.q0 = spec.newtonian ? 0.0 : energy(q, spec.c);
                c.weight = eq.sqrt_value(q) * vol;
                c.index = static_cast<std::size_t>(a);
                out.push_back(c);
            }
    return out;
}

void check_input(const VelocityGrid& grid, const Eigen::VectorXd& h1, const Eigen::VectorXd& h2) {
    if (static_cast<std::size_t>(h1.size()) != grid.size() || static_cast<std::size_t>(h2.size()) != grid.size())
        throw Error(Errc::GridMismatch, "gamma: input size does not match the grid");
    if (!h1.allFinite() || !h2.allFinite()) throw Error(Errc::NonFinite, "gamma: non-finite input");
}

}  // namespace

CollisionQuadrature CollisionQuadrature::make(int omega_polar, int omega_azimuth, int q_stride) {
    CollisionQuadrature q;
    q.omega = make_sphere_rule(omega_polar, omega_azimuth);
    q.q_stride = q_stride;
    return q;
}

double CollisionQuadrature::omega_weight_sum() const {
    double s = 0.0;
    for (double w : omega.w) s += w;
    return s;
}

GammaResult gamma_rel(const Eigen::VectorXd& h1, const Eigen::VectorXd& h2, double c, const VelocityGrid& grid,
                      const CollisionQuadrature& quad, const std::vector<Vec3>* points) {
    check_input(grid, h1, h2);
    const EquilibriumSpec spec = EquilibriumSpec::relativistic(c);
    const std::vector<QCell> qs = q_cells(spec, grid, quad);
    const std::vector<Vec3>& ps = points ? *points : grid.centers();
    const SphereRule& sr = quad.omega;
    GammaResult out;
    out.gain = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ps.size()));
    out.loss = out.gain;
    for (std::size_t a = 0; a < ps.size(); ++a) {
        const Vec3& p = ps[a];
        const double p0 = energy(p, c);
        const double h1p = points ? grid.interpolate(h1.data(), p, quad.interpolation) : h1(static_cast<Eigen::Index>(a));
        long double gain = 0.0L, loss = 0.0L;
        for (const QCell& qc : qs) {
            const Vec3& q = qc.q;
            const double q0 = qc.q0;
            const Vec3 u = p / p0 - q / q0;
            const double un = norm(u);
            if (un == 0.0) continue;
            const Frame fr = frame_about(u);
            const Vec3 sum = p + q;
            const double s3 = dot(sum, fr.e3), s1 = dot(sum, fr.e1), s2 = dot(sum, fr.e2);
            const double e = p0 + q0, e2 = e * e;
            const double s = invariants(p, q, c).s;
            long double g = 0.0L, l = 0.0L;
            for (std::size_t k = 0; k < sr.size(); ++k) {
                const double ws = sr.ct[k] * s3 + sr.st[k] * (sr.cp[k] * s1 + sr.sp[k] * s2);
                const double den = e2 - ws * ws;
                const double wu = sr.ct[k] * un;  // omega . (p/p0 - q/q0)
                const double kern = s * c * e2 * std::abs(wu) / (den * den);
                const double amp = -2.0 * p0 * q0 * e * wu / den;
                const Vec3 om = sphere_node(fr, sr, k);
                const Vec3 pp = p + amp * om, qq = q - amp * om;
                const double w = sr.w[k] * kern;
                g += static_cast<long double>(w * grid.interpolate(h1.data(), pp, quad.interpolation) * grid.interpolate(h2.data(), qq, quad.interpolation));
                l += static_cast<long double>(w);
            }
            gain += g * qc.weight;
            loss += l * qc.weight * h2(static_cast<Eigen::Index>(qc.index));
        }
        out.gain(static_cast<Eigen::Index>(a)) = static_cast<double>(gain);
        out.loss(static_cast<Eigen::Index>(a)) = static_cast<double>(loss) * h1p;
    }
    if (!out.gain.allFinite() || !out.loss.allFinite()) throw Error(Errc::NonFinite, "gamma_rel: non-finite result");
    return out;
}

GammaResult gamma_newton(const Eigen::VectorXd& h1, const Eigen::VectorXd& h2, const VelocityGrid& grid,
                         const CollisionQuadrature& quad, const std::vector<Vec3>* points) {
    check_input(grid, h1, h2);
    const std::vector<QCell> qs = q_cells(EquilibriumSpec::newtonian_limit(), grid, quad);
    const std::vector<Vec3>& ps = points ? *points : grid.centers();
    const SphereRule& sr = quad.omega;
    GammaResult out;
    out.gain = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ps.size()));
    out.loss = out.gain;
    for (std::size_t a = 0; a < ps.size(); ++a) {
        const Vec3& p = ps[a];
        const double h1p = points ? grid.interpolate(h1.data(), p, quad.interpolation) : h1(static_cast<Eigen::Index>(a));
        long double gain = 0.0L, loss = 0.0L;
        for (const QCell& qc : qs) {
            const Vec3& q = qc.q;
            const Vec3 u = p - q;
            const double un = norm(u);
            if (un == 0.0) continue;
            const Frame fr = frame_about(u);
            long double g = 0.0L, l = 0.0L;
            for (std::size_t k = 0; k < sr.size(); ++k) {
                const double wu = sr.ct[k] * un;
                const Vec3 om = sphere_node(fr, sr, k);
                const Vec3 pp = p - wu * om, qq = q + wu * om;
                const double w = sr.w[k] * std::abs(wu);
                g += static_cast<long double>(w * grid.interpolate(h1.data(), pp, quad.interpolation) * grid.interpolate(h2.data(), qq, quad.interpolation));
                l += static_cast<long double>(w);
            }
            gain += g * qc.weight;
            loss += l * qc.weight * h2(static_cast<Eigen::Index>(qc.index));
        }
        out.gain(static_cast<Eigen::Index>(a)) = static_cast<double>(gain);
        out.loss(static_cast<Eigen::Index>(a)) = static_cast<double>(loss) * h1p;
    }
    if (!out.gain.allFinite() || !out.loss.allFinite()) throw Error(Errc::NonFinite, "gamma_newton: non-finite result");
    return out;
}

GammaResult gamma(const EquilibriumSpec& spec, const VelocityGrid& grid, const Eigen::VectorXd& h1,
                  const Eigen::VectorXd& h2, const CollisionQuadrature& quad, const std::vector<Vec3>* points) {
    return spec.newtonian ? gamma_newton(h1, h2, grid, quad, points) : gamma_rel(h1, h2, spec.c, grid, quad, points);
}

GammaBound gamma_bound_check(const Eigen::VectorXd& h1, const Eigen::VectorXd& h2, const EquilibriumSpec& spec,
                             double beta, const VelocityGrid& grid, const CollisionQuadrature& quad,
                             const std::vector<Vec3>& points, const Eigen::VectorXd& nu) {
    if (!(beta > 3.5)) throw Error(Errc::InvalidInput, "gamma_bound_check: beta must exceed 7/2");
    if (static_cast<std::size_t>(nu.size()) != points.size())
        throw Error(Errc::GridMismatch, "gamma_bound_check: nu size does not match the points");
    double n1 = 0.0, n2 = 0.0;
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const double w = weight(grid.center(a), beta);
        n1 = std::max(n1, w * std::abs(h1(static_cast<Eigen::Index>(a))));
        n2 = std::max(n2, w * std::abs(h2(static_cast<Eigen::Index>(a))));
    }
    GammaBound out;
    if (n1 == 0.0 || n2 == 0.0) return out;
    const GammaResult g = gamma(spec, grid, h1, h2, quad, &points);
    const Eigen::VectorXd tot = g.total();
    double full = 0.0, gain = 0.0;
    for (std::size_t a = 0; a < points.size(); ++a) {
        const auto i = static_cast<Eigen::Index>(a);
        const double w = weight(points[a], beta);
        full = std::max(full, w * std::abs(tot(i)) / nu(i));
        gain = std::max(gain, w * std::abs(g.gain(i)));
    }
    out.ratio = full / (n1 * n2);
    out.gain_ratio = gain / (n1 * n2);
    return out;
}

}  // namespace relkin
