#include "relkin/linear_ops.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <memory>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include "relkin/error.hpp"
#include "relkin/kinematics.hpp"
#include "relkin/quadrature.hpp"
#include "relkin/special_fn.hpp"

namespace relkin {

namespace {

constexpr double kPi = std::numbers::pi;

// Breakpoints a = t0 < ... < tn = b containing every `extra` point strictly
// inside, each piece split into equal panels no wider than `width`.
std::vector<double> panel_breaks(double a, double b, std::vector<double> extra, double width) {
    extra.push_back(a);
    extra.push_back(b);
    std::sort(extra.begin(), extra.end());
    std::vector<double> out;
    double prev = a;
    out.push_back(a);
    for (double t : extra) {
        if (t <= prev + 1e-12 || t > b) continue;
        const int n = std::max(1, static_cast<int>(std::ceil((t - prev) / width)));
        for (int i = 1; i <= n; ++i) out.push_back(prev + (t - prev) * i / n);
        prev = t;
    }
    return out;
}

Rule1D unit_rule(int order) { return gauss_legendre(order, 0.0, 1.0); }

// nu(p) = (2 pi / P) int rho d rho int r dr Phi(q), with rho = |q - p|, r = |q|;
// for P = 0 it reduces to 4 pi int r^2 Phi(r e) dr.
template <class Phi>
double nu_integral(const Vec3& p, double rmax, int order, double width, Phi&& phi) {
    const Rule1D u = unit_rule(order);
    const double P = norm(p);
    if (P < 1e-12) {
        const Vec3 e{0.0, 0.0, 1.0};
        std::vector<double> br = panel_breaks(0.0, rmax, {}, width);
        long double sum = 0.0L;
        for (std::size_t k = 0; k + 1 < br.size(); ++k) {
            const double a = br[k], len = br[k + 1] - br[k];
            for (std::size_t i = 0; i < u.x.size(); ++i) {
                const double r = a + len * u.x[i];
                sum += static_cast<long double>(u.w[i] * len * r * r * phi(r * e));
            }
        }
        return 4.0 * kPi * static_cast<double>(sum);
    }
    const Vec3 ph = p / P;
    const Frame fr = frame_about(ph);
    std::vector<double> brho = panel_breaks(0.0, P + rmax, {P, rmax - P}, width);
    long double sum = 0.0L;
    for (std::size_t k = 0; k + 1 < brho.size(); ++k) {
        const double a = brho[k], len = brho[k + 1] - brho[k];
        for (std::size_t i = 0; i < u.x.size(); ++i) {
            const double rho = a + len * u.x[i];
            const double lo = std::abs(rho - P), hi = std::min(rho + P, rmax);
            if (!(hi > lo)) continue;
            std::vector<double> br = panel_breaks(lo, hi, {}, width);
            long double inner = 0.0L;
            for (std::size_t m = 0; m + 1 < br.size(); ++m) {
                const double b = br[m], l2 = br[m + 1] - br[m];
                for (std::size_t j = 0; j < u.x.size(); ++j) {
                    const double r = b + l2 * u.x[j];
                    double mu = (r * r + P * P - rho * rho) / (2.0 * r * P);
                    mu = std::clamp(mu, -1.0, 1.0);
                    const double st = std::sqrt((1.0 - mu) * (1.0 + mu));
                    const Vec3 q = r * (mu * ph + st * fr.e1);
                    inner += static_cast<long double>(u.w[j] * l2 * r * phi(q));
                }
            }
            sum += static_cast<long double>(u.w[i] * len * rho) * inner;
        }
    }
    return 2.0 * kPi / P * static_cast<double>(sum);
}

double nu_width(const EquilibriumSpec& spec) { return spec.newtonian ? 0.75 : (spec.c < 4.0 ? 1.5 : 0.75); }

double nu_rmax(const EquilibriumSpec& spec) { return spec.newtonian ? 12.0 : equilibrium_radius(spec.c); }

// Scaled Bessel factor 1/(e^{c^2} K2(c^2)) for kernel normalisation.
struct RelConst {
    double c = 0.0, c2 = 0.0, inv_k2s = 0.0;
    explicit RelConst(double c_) : c(c_), c2(c_ * c_), inv_k2s(1.0 / bessel_k(2, c_ * c_).scaled) {}
};

const RelConst& rel_const(double c) {
    thread_local std::unique_ptr<RelConst> cache;
    if (!cache || cache->c != c) cache = std::make_unique<RelConst>(c);
    return *cache;
}

KernelParts rel_parts(const Vec3& p, const Vec3& q, double p0, double q0, double kp, double kq, const RelConst& rc) {
    const double c = rc.c, c2 = rc.c2;
    const Vec3 d = p - q;
    const double de = dot(d, p + q) / (p0 + q0);
    double g2 = norm2(d) - de * de;
    if (!(g2 > 0.0)) throw Error(Errc::DiagonalSingular, "kernel_k_rel: p = q");
    const double g = std::sqrt(g2);
    const double s = g2 + 4.0 * c2;
    const double ell_m = 0.5 * c * (kp + kq);  // ell - c^2
    const double ell = c2 + ell_m;
    const double j = c * norm(cross(p, q)) / g;
    double r2m = ell_m * (ell + c2) - j * j;  // ell^2 - j^2 - c^4
    double r2 = r2m + c2 * c2;
    if (!(r2 > 0.0)) {
        CollisionInvariants inv{s, g, ell, j, false};
        r2 = guarded_ell2_minus_j2(inv);
        r2m = r2 - c2 * c2;
    }
    const double r = std::sqrt(r2);
    const double r_m = r2m / (r + c2);  // r - c^2
    KernelParts out;
    const double pq = p0 * q0;
    out.k1 = 0.25 * rc.inv_k2s * g * std::sqrt(s) / pq * std::exp(-ell_m);
    const double bracket = ell / r2 * (1.0 + 1.0 / r) + 1.0 / r;
    out.k2 = 0.125 * rc.inv_k2s * s * std::sqrt(s) / (g * pq) * bracket * std::exp(-r_m);
    return out;
}

KernelParts newton_parts(const Vec3& p, const Vec3& q) {
    const Vec3 d = p - q;
    const double d2 = norm2(d);
    if (!(d2 > 0.0)) throw Error(Errc::DiagonalSingular, "kernel_k_newton: p = q");
    const double dn = std::sqrt(d2);
    const double np = norm2(p), nq = norm2(q);
    KernelParts out;
    out.k1 = dn * std::exp(-0.25 * (np + nq)) / std::sqrt(2.0 * kPi);
    const double e = (np - nq);
    out.k2 = 2.0 * std::sqrt(2.0 / kPi) / dn * std::exp(-d2 / 8.0 - e * e / (8.0 * d2));
    return out;
}

// Kernel evaluator with per-point kinematic quantities cached.
class KernelEval {
public:
    KernelEval(const EquilibriumSpec& spec) : spec_(spec) {
        if (!spec.newtonian) rc_ = std::make_unique<RelConst>(spec.c);
    }
    struct Point {
        Vec3 p;
        double p0 = 0.0, kin = 0.0;
    };
    Point point(const Vec3& p) const {
        Point pt{p, 0.0, 0.0};
        if (rc_) {
            pt.p0 = energy(p, spec_.c);
            pt.kin = kinetic_energy(p, spec_.c);
        }
        return pt;
    }
    double operator()(const Point& a, const Point& b) const {
        if (rc_) return rel_parts(a.p, b.p, a.p0, b.p0, a.kin, b.kin, *rc_).value();
        return newton_parts(a.p, b.p).value();
    }
    double operator()(const Vec3& a, const Vec3& b) const { return (*this)(point(a), point(b)); }

private:
    EquilibriumSpec spec_;
    std::unique_ptr<RelConst> rc_;
};

double cube_integral(const KernelEval& ke, const Vec3& p, const Vec3& centre, double h, const Rule1D& r) {
    const auto pp = ke.point(p);
    long double sum = 0.0L;
    for (std::size_t i = 0; i < r.x.size(); ++i)
        for (std::size_t j = 0; j < r.x.size(); ++j)
            for (std::size_t k = 0; k < r.x.size(); ++k) {
                const Vec3 q = centre + 0.5 * h * Vec3{r.x[i], r.x[j], r.x[k]};
                sum += static_cast<long double>(r.w[i] * r.w[j] * r.w[k] * ke(pp, ke.point(q)));
            }
    return static_cast<double>(sum) * 0.125 * h * h * h;
}

double self_cell(const KernelEval& ke, const Vec3& p, double h, const Rule1D& t, const Rule1D& uv) {
    const double a = 0.5 * h;
    const auto pp = ke.point(p);
    long double sum = 0.0L;
    for (int axis = 0; axis < 3; ++axis)
        for (int sign = -1; sign <= 1; sign += 2) {
            Vec3 n, e1, e2;
            n[axis] = sign;
            e1[(axis + 1) % 3] = 1.0;
            e2[(axis + 2) % 3] = 1.0;
            for (std::size_t i = 0; i < t.x.size(); ++i)
                for (std::size_t j = 0; j < uv.x.size(); ++j)
                    for (std::size_t k = 0; k < uv.x.size(); ++k) {
                        const double tt = t.x[i];
                        const Vec3 q = p + (tt * a) * (n + uv.x[j] * e1 + uv.x[k] * e2);
                        sum += static_cast<long double>(t.w[i] * uv.w[j] * uv.w[k] * tt * tt * ke(pp, ke.point(q)));
                    }
        }
    return static_cast<double>(sum) * a * a * a;
}

std::vector<double> log_sqrt_eq(const EquilibriumSpec& spec, const VelocityGrid& grid) {
    const Equilibrium eq(spec);
    std::vector<double> out(grid.size());
    for (std::size_t a = 0; a < grid.size(); ++a) out[a] = 0.5 * eq.log_value(grid.center(a));
    return out;
}

// nu(p) - sum_{q != p} K[p][q] sqrt(J(q)) / sqrt(J(p)).
double subtracted_diagonal(const double* row, std::size_t a, const std::vector<double>& lsq, double nu_a) {
    long double sum = 0.0L;
    for (std::size_t b = 0; b < lsq.size(); ++b)
        if (b != a) sum += static_cast<long double>(row[b] * std::exp(lsq[b] - lsq[a]));
    return nu_a - static_cast<double>(sum);
}

double lattice_factor(const VelocityGrid& grid, std::size_t a, std::size_t b, const AssemblyOptions& opt) {
    if (!opt.richardson) return 1.0;
    int i, j, k, l, m, n;
    grid.lattice(a, i, j, k);
    grid.lattice(b, l, m, n);
    const bool even = ((i - l) % 2 == 0) && ((j - m) % 2 == 0) && ((k - n) % 2 == 0);
    return even ? 8.0 / 15.0 : 16.0 / 15.0;
}

void require_nu(const AssemblyOptions& opt, const VelocityGrid& grid, const Eigen::VectorXd* nu) {
    if (opt.diagonal != DiagonalRule::Subtracted) return;
    if (!nu) throw Error(Errc::InvalidInput, "assemble_K: subtracted diagonal needs nu on the grid");
    if (static_cast<std::size_t>(nu->size()) != grid.size()) throw Error(Errc::GridMismatch, "assemble_K: nu size");
}

template <class F>
void for_each_neighbour(const VelocityGrid& grid, std::size_t a, F&& f) {
    int i, j, k;
    grid.lattice(a, i, j, k);
    for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
            for (int dk = -1; dk <= 1; ++dk) {
                if (di == 0 && dj == 0 && dk == 0) continue;
                const int b = grid.index(i + di, j + dj, k + dk);
                if (b >= 0) f(static_cast<std::size_t>(b));
            }
}

double near_entry(const KernelEval& ke, const VelocityGrid& grid, std::size_t a, std::size_t b, const Rule1D& r) {
    const double x = cube_integral(ke, grid.center(a), grid.center(b), grid.spacing(), r);
    const double y = cube_integral(ke, grid.center(b), grid.center(a), grid.spacing(), r);
    return 0.5 * (x + y);
}

}  // namespace

double nu_newton_exact(const Vec3& p) {
    const double a = norm(p);
    if (a < 1e-8) return 4.0 * std::sqrt(2.0 * kPi);
    return 2.0 * kPi * (std::sqrt(2.0 / kPi) * std::exp(-0.5 * a * a) + (a + 1.0 / a) * std::erf(a / std::sqrt(2.0)));
}

double nu_rel(const Vec3& p, double c, const NuQuadrature& quad) {
    if (!(c > 0.0) || !std::isfinite(norm2(p))) throw Error(Errc::InvalidInput, "nu_rel: invalid arguments");
    const EquilibriumSpec spec = EquilibriumSpec::relativistic(c);
    const Equilibrium eq(spec);
    const SphereRule sr = make_sphere_rule(quad.omega_polar, quad.omega_azimuth);
    const double p0 = energy(p, c);
    auto phi = [&](const Vec3& q) {
        // K_c = (s/(p0 q0)) c E^2 p0 q0 |w.u| / (E^2 - (w.(p+q))^2)^2 with the
        // rule aligned on u, so w.u = cos(theta) |u|.
        const double q0 = energy(q, c);
        const Vec3 u = p / p0 - q / q0;
        const double un = norm(u);
        if (un == 0.0) return 0.0;
        const Frame fr = frame_about(u);
        const Vec3 sum = p + q;
        const double s3 = dot(sum, fr.e3), s1 = dot(sum, fr.e1), s2 = dot(sum, fr.e2);
        const double e = p0 + q0, e2 = e * e;
        long double acc = 0.0L;
        for (std::size_t k = 0; k < sr.size(); ++k) {
            const double ws = sr.ct[k] * s3 + sr.st[k] * (sr.cp[k] * s1 + sr.sp[k] * s2);
            const double den = e2 - ws * ws;
            acc += static_cast<long double>(sr.w[k] * std::abs(sr.ct[k]) / (den * den));
        }
        const double s = invariants(p, q, c).s;
        return static_cast<double>(acc) * s * c * e2 * un * eq.value(q);
    };
    return nu_integral(p, nu_rmax(spec), quad.radial_order, nu_width(spec), phi);
}

double nu_newton(const Vec3& p, const NuQuadrature& quad) {
    if (!std::isfinite(norm2(p))) throw Error(Errc::InvalidInput, "nu_newton: non-finite momentum");
    const SphereRule sr = make_sphere_rule(quad.omega_polar, quad.omega_azimuth);
    auto phi = [&](const Vec3& q) {
        const Vec3 u = p - q;
        if (norm2(u) == 0.0) return 0.0;
        const Frame fr = frame_about(u);
        long double s = 0.0L;
        for (std::size_t k = 0; k < sr.size(); ++k)
            s += static_cast<long double>(sr.w[k] * kernel_newton(p, q, sphere_node(fr, sr, k)));
        return static_cast<double>(s) * gaussian(q);
    };
    return nu_integral(p, nu_rmax(EquilibriumSpec::newtonian_limit()), quad.radial_order,
                       nu_width(EquilibriumSpec::newtonian_limit()), phi);
}

double nu(const EquilibriumSpec& spec, const Vec3& p, const NuQuadrature& quad) {
    return spec.newtonian ? nu_newton(p, quad) : nu_rel(p, spec.c, quad);
}

double nu_checked(const EquilibriumSpec& spec, const Vec3& p, const NuQuadrature& quad) {
    const double v = nu(spec, p, quad), w = nu(spec, p, quad.doubled());
    if (std::abs(v - w) > 1e-4 * std::abs(w))
        throw Error(Errc::QuadratureUnderResolved, "nu: node doubling changed the value by more than 1e-4");
    return v;
}

NuTable::NuTable(const EquilibriumSpec& spec, double radius, const NuQuadrature& quad, int nodes) : radius_(radius) {
    if (!(radius > 0.0) || nodes < 3) throw Error(Errc::InvalidInput, "NuTable: invalid radius or node count");
    const Vec3 dir{0.48, 0.6, 0.64};
    const double u_max = radius * radius;
    const int m = nodes - 1;
    for (int k = 0; k <= m; ++k) {
        const double u = 0.5 * u_max * (1.0 - std::cos(kPi * k / m));
        x_.push_back(u);
        f_.push_back(nu(spec, std::sqrt(u) * dir, quad));
        double w = (k % 2 == 0) ? 1.0 : -1.0;
        if (k == 0 || k == m) w *= 0.5;
        w_.push_back(w);
    }
    for (double r : {0.0, 0.5 * radius, radius}) {
        const Vec3 p = r * dir;
        const double v = nu(spec, p, quad), w = nu(spec, p, quad.doubled());
        doubling_gap_ = std::max(doubling_gap_, std::abs(v - w) / std::abs(w));
    }
    if (doubling_gap_ > 1e-4)
        throw Error(Errc::QuadratureUnderResolved, "nu table: node doubling changed values by more than 1e-4");
}

double NuTable::operator()(double r) const {
    const double u = r * r;
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < x_.size(); ++k) {
        const double d = u - x_[k];
        if (d == 0.0) return f_[k];
        const double t = w_[k] / d;
        num += t * f_[k];
        den += t;
    }
    return num / den;
}

Eigen::VectorXd nu_on_grid(const EquilibriumSpec& spec, const VelocityGrid& grid, const NuQuadrature& quad) {
    NuTable table(spec, grid.radius(), quad);
    Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t a = 0; a < grid.size(); ++a) out(static_cast<Eigen::Index>(a)) = table(norm(grid.center(a)));
    return out;
}

KernelParts kernel_parts_rel(const Vec3& p, const Vec3& q, double c) {
    if (!(c > 0.0)) throw Error(Errc::InvalidInput, "kernel_k_rel: c must be positive");
    return rel_parts(p, q, energy(p, c), energy(q, c), kinetic_energy(p, c), kinetic_energy(q, c), rel_const(c));
}

KernelParts kernel_parts_newton(const Vec3& p, const Vec3& q) { return newton_parts(p, q); }

double kernel_k_rel(const Vec3& p, const Vec3& q, double c) { return kernel_parts_rel(p, q, c).value(); }

double kernel_k_newton(const Vec3& p, const Vec3& q) { return newton_parts(p, q).value(); }

double kernel_k(const EquilibriumSpec& spec, const Vec3& p, const Vec3& q) {
    return spec.newtonian ? kernel_k_newton(p, q) : kernel_k_rel(p, q, spec.c);
}

double self_cell_integral(const EquilibriumSpec& spec, const Vec3& p, double h, int m) {
    KernelEval ke(spec);
    return self_cell(ke, p, h, unit_rule(m), gauss_legendre(m));
}

DenseOperator assemble_K(const EquilibriumSpec& spec, const VelocityGrid& grid, const AssemblyOptions& opt,
                         const Eigen::VectorXd* nu) {
    require_nu(opt, grid, nu);
    KernelEval ke(spec);
    const std::size_t n = grid.size();
    std::vector<KernelEval::Point> pts(n);
    for (std::size_t a = 0; a < n; ++a) pts[a] = ke.point(grid.center(a));
    DenseOperator op;
    op.radius = grid.radius();
    op.n_per_axis = grid.n_per_axis();
    op.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::MatrixXd& K = op.matrix;
    const double vol = grid.cell_volume();
    const Rule1D t = unit_rule(opt.near_field_order), uv = gauss_legendre(opt.near_field_order);
    for (std::size_t b = 0; b < n; ++b) {
        const auto bi = static_cast<Eigen::Index>(b);
        for (std::size_t a = 0; a < b; ++a) {
            const double v = ke(pts[a], pts[b]) * vol * lattice_factor(grid, a, b, opt);
            K(static_cast<Eigen::Index>(a), bi) = v;
            K(bi, static_cast<Eigen::Index>(a)) = v;
        }
        K(bi, bi) = opt.diagonal == DiagonalRule::SelfCell ? self_cell(ke, pts[b].p, grid.spacing(), t, uv) : 0.0;
    }
    if (opt.near_field) {
        for (std::size_t a = 0; a < n; ++a)
            for_each_neighbour(grid, a, [&](std::size_t b) {
                if (b < a) return;
                const double v = near_entry(ke, grid, a, b, uv);
                K(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
                K(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
            });
    }
    if (opt.diagonal == DiagonalRule::Subtracted) {
        const std::vector<double> lsq = log_sqrt_eq(spec, grid);
        for (std::size_t a = 0; a < n; ++a) {
            const auto ai = static_cast<Eigen::Index>(a);
            K(ai, ai) = subtracted_diagonal(&K(0, ai), a, lsq, (*nu)(ai));  // column a == row a
        }
    }
    for (Eigen::Index i = 0; i < K.size(); ++i)
        if (!std::isfinite(K.data()[i])) throw Error(Errc::NonFinite, "assemble_K: non-finite entry");
    return op;
}

Eigen::MatrixXd apply_K_free(const EquilibriumSpec& spec, const VelocityGrid& grid, const Eigen::MatrixXd& x,
                             const AssemblyOptions& opt, const Eigen::VectorXd* nu) {
    require_nu(opt, grid, nu);
    KernelEval ke(spec);
    const std::size_t n = grid.size();
    if (static_cast<std::size_t>(x.rows()) != n) throw Error(Errc::GridMismatch, "apply_K_free: size mismatch");
    std::vector<KernelEval::Point> pts(n);
    for (std::size_t a = 0; a < n; ++a) pts[a] = ke.point(grid.center(a));
    const std::vector<double> lsq = log_sqrt_eq(spec, grid);
    const Rule1D t = unit_rule(opt.near_field_order), uv = gauss_legendre(opt.near_field_order);
    const double vol = grid.cell_volume();
    Eigen::MatrixXd out(x.rows(), x.cols());
    Eigen::RowVectorXd row(static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a) {
        const auto ai = static_cast<Eigen::Index>(a);
        for (std::size_t b = 0; b < n; ++b)
            row(static_cast<Eigen::Index>(b)) = b == a ? 0.0 : ke(pts[a], pts[b]) * vol * lattice_factor(grid, a, b, opt);
        if (opt.near_field)
            for_each_neighbour(grid, a, [&](std::size_t b) { row(static_cast<Eigen::Index>(b)) = near_entry(ke, grid, a, b, uv); });
        if (opt.diagonal == DiagonalRule::SelfCell) row(ai) = self_cell(ke, pts[a].p, grid.spacing(), t, uv);
        if (opt.diagonal == DiagonalRule::Subtracted) row(ai) = subtracted_diagonal(row.data(), a, lsq, (*nu)(ai));
        out.row(ai) = row * x;
    }
    return out;
}

namespace {
constexpr char kMagic[8] = {'R', 'L', 'K', 'O', 'P', '1', '\0', '\0'};
}

void write_operator(const DenseOperator& op, const std::string& path) {
    static_assert(std::endian::native == std::endian::little, "operator dump assumes a little-endian host");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(Errc::Io, "write_operator: cannot open " + path);
    const std::int64_t n = op.n_per_axis;
    os.write(kMagic, 8);
    os.write(reinterpret_cast<const char*>(&n), 8);
    os.write(reinterpret_cast<const char*>(&op.radius), 8);
    const Eigen::Index dim = op.matrix.rows();
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double v = op.matrix(i, j);
            os.write(reinterpret_cast<const char*>(&v), 8);
        }
    if (!os) throw Error(Errc::Io, "write_operator: write failed for " + path);
}

DenseOperator read_operator(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(Errc::Io, "read_operator: cannot open " + path);
    char magic[8];
    std::int64_t n = 0;
    DenseOperator op;
    is.read(magic, 8);
    is.read(reinterpret_cast<char*>(&n), 8);
    is.read(reinterpret_cast<char*>(&op.radius), 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) throw Error(Errc::Io, "read_operator: bad header in " + path);
    op.n_per_axis = static_cast<int>(n);
    const VelocityGrid grid(op.radius, op.n_per_axis);
    const auto dim = static_cast<Eigen::Index>(grid.size());
    op.matrix.resize(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) is.read(reinterpret_cast<char*>(&op.matrix(i, j)), 8);
    if (!is) throw Error(Errc::Io, "read_operator: truncated file " + path);
    return op;
}

LinearOperator::LinearOperator(const EquilibriumSpec& spec, const VelocityGrid& grid, const NuQuadrature& quad,
                               const AssemblyOptions& opt)
    : spec_(spec), grid_(grid), nu_(nu_on_grid(spec, grid, quad)), K_(assemble_K(spec, grid, opt, &nu_)) {}

Eigen::VectorXd LinearOperator::apply(const Eigen::VectorXd& f) const {
    if (f.size() != nu_.size()) throw Error(Errc::GridMismatch, "apply_L: size mismatch");
    return nu_.cwiseProduct(f) - K_.matrix * f;
}

Eigen::MatrixXd LinearOperator::apply(const Eigen::MatrixXd& f) const {
    if (f.rows() != nu_.size()) throw Error(Errc::GridMismatch, "apply_L: size mismatch");
    return nu_.asDiagonal() * f - K_.matrix * f;
}

Eigen::VectorXd apply_L(const LinearOperator& op, const Eigen::VectorXd& f) { return op.apply(f); }

MacroProjector::MacroProjector(const EquilibriumSpec& spec, const VelocityGrid& grid) : e_(macro_basis(spec, grid)) {
    const Eigen::MatrixXd g = gram(e_, grid);
    ginv_et_ = g.ldlt().solve(e_.transpose()) * grid.cell_volume();
    sqrt_a1_ = spec.newtonian ? 1.0 : std::sqrt(closed_form_moments(spec.c).a[1]);
}

Eigen::VectorXd MacroProjector::coordinates(const Eigen::VectorXd& f) const { return ginv_et_ * f; }

MacroCoefficients MacroProjector::coefficients(const Eigen::VectorXd& f) const {
    const Eigen::VectorXd x = coordinates(f);
    MacroCoefficients m;
    m.a_coef = x(0);
    m.b_coef = Vec3{x(1), x(2), x(3)} / sqrt_a1_;
    m.c_coef = x(4);
    return m;
}

Eigen::VectorXd MacroProjector::project(const Eigen::VectorXd& f) const { return e_ * coordinates(f); }

Eigen::MatrixXd MacroProjector::project(const Eigen::MatrixXd& f) const { return e_ * (ginv_et_ * f); }

std::pair<MacroCoefficients, Eigen::VectorXd> project_P(const MacroProjector& proj, const Eigen::VectorXd& f) {
    return {proj.coefficients(f), proj.project(f)};
}

double coercivity(const LinearOperator& op) {
    const Eigen::VectorXd& nu = op.nu();
    const Eigen::VectorXd dinv = nu.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd M = dinv.asDiagonal() * (-op.K()) * dinv.asDiagonal();
    M.diagonal().array() += 1.0;
    M = 0.5 * (M + M.transpose()).eval();
    const Eigen::MatrixXd e = dinv.asDiagonal() * macro_basis(op.spec(), op.grid());
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(e);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(e.rows(), e.cols());
    // (I - QQ^T) M (I - QQ^T) + sigma QQ^T
    const Eigen::MatrixXd MQ = M * Q;
    const Eigen::MatrixXd QtMQ = Q.transpose() * MQ;
    M -= MQ * Q.transpose();
    M -= Q * MQ.transpose();
    M += Q * QtMQ * Q.transpose();
    const double sigma = 10.0 * M.diagonal().cwiseAbs().maxCoeff() + 10.0;
    M += sigma * Q * Q.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(Errc::EigSolverFailure, "coercivity: eigensolver did not converge");
    return es.eigenvalues()(0);
}

}  // namespace relkin
