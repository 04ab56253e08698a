#include "relkin/solver.hpp"

#include <cmath>
#include <numbers>

#include "relkin/csv.hpp"
#include "relkin/error.hpp"
#include "relkin/kinematics.hpp"

namespace relkin {

SolverOperators::SolverOperators(const EquilibriumSpec& spec, const VelocityGrid& g, const NuQuadrature& quad)
    : regime(spec), grid(g), nu(nu_on_grid(spec, g, quad)) {
    K = assemble_K(spec, g, {}, &nu).matrix;
    projector = std::make_shared<MacroProjector>(spec, g);
    const Equilibrium e(spec);
    const auto n = static_cast<Eigen::Index>(g.size());
    psi_weights.resize(n, 5);
    sqrt_eq.resize(n);
    eq.resize(n);
    velocity.resize(n, 3);
    for (Eigen::Index a = 0; a < n; ++a) {
        const Vec3& p = g.center(static_cast<std::size_t>(a));
        sqrt_eq(a) = e.sqrt_value(p);
        eq(a) = e.value(p);
        const double w = sqrt_eq(a) * g.cell_volume();
        psi_weights(a, 0) = w;
        psi_weights(a, 1) = w * p.x;
        psi_weights(a, 2) = w * p.y;
        psi_weights(a, 3) = w * p.z;
        psi_weights(a, 4) = w * (spec.newtonian ? 0.5 * norm2(p) : kinetic_energy(p, spec.c));
        const Vec3 v = spec.newtonian ? p : velocity_hat(p, spec.c);
        velocity(a, 0) = v.x;
        velocity(a, 1) = v.y;
        velocity(a, 2) = v.z;
    }
}

namespace {

double spatial_profile(const SolverConfig& cfg, int i, int j, int k) {
    if (cfg.spatial == SpatialMode::Homogeneous) return 1.0;
    const double dx = cfg.length / cfg.n_x;
    const double kw = 2.0 * std::numbers::pi * cfg.init.spatial_mode / cfg.length;
    return 1.0 + (std::cos(kw * i * dx) + std::cos(kw * j * dx) + std::cos(kw * k * dx)) / 3.0;
}

double velocity_profile(Profile prof, const Vec3& p) {
    switch (prof) {
        case Profile::GaussianBump: {
            const Vec3 d = p - Vec3{0.5, 0.0, 0.0};
            return std::exp(-0.5 * norm2(d));
        }
        case Profile::OddMode:
            return p.x * std::exp(-0.5 * norm2(p));
    }
    return 0.0;
}

void check_positivity(const Eigen::MatrixXd& f, const SolverOperators& ops, std::size_t& negatives) {
    for (Eigen::Index x = 0; x < f.cols(); ++x)
        for (Eigen::Index a = 0; a < f.rows(); ++a)
            if (ops.eq(a) + ops.sqrt_eq(a) * f(a, x) < 0.0) ++negatives;
}

void shift_rows(const Eigen::MatrixXd& in, Eigen::MatrixXd& out, const SolverOperators& ops, const SolverConfig& cfg,
                double tau) {
    const int n = cfg.n_x;
    const double dx = cfg.length / n;
    out.resize(in.rows(), in.cols());
    std::vector<double> a(static_cast<std::size_t>(in.cols())), b(a.size());
    for (Eigen::Index r = 0; r < in.rows(); ++r) {
        for (Eigen::Index x = 0; x < in.cols(); ++x) a[static_cast<std::size_t>(x)] = in(r, x);
        const Vec3 s{ops.velocity(r, 0) * tau, ops.velocity(r, 1) * tau, ops.velocity(r, 2) * tau};
        periodic_shift(a.data(), b.data(), n, dx, s);
        for (Eigen::Index x = 0; x < in.cols(); ++x) out(r, x) = b[static_cast<std::size_t>(x)];
    }
}

}  // namespace

void periodic_shift(const double* in, double* out, int n, double dx, const Vec3& shift) {
    const std::size_t total = static_cast<std::size_t>(n) * n * n;
    std::vector<double> tmp(in, in + total), next(total);
    const std::size_t stride[3] = {static_cast<std::size_t>(n) * n, static_cast<std::size_t>(n), 1};
    for (int d = 0; d < 3; ++d) {
        const double sigma = shift[d] / dx;
        const double m = std::floor(sigma);
        const double th = sigma - m;
        const int mi = static_cast<int>(m);
        for (std::size_t idx = 0; idx < total; ++idx) {
            const int pos = static_cast<int>((idx / stride[d]) % static_cast<std::size_t>(n));
            const std::size_t base = idx - static_cast<std::size_t>(pos) * stride[d];
            const int j0 = ((pos - mi) % n + n) % n, j1 = ((pos - mi - 1) % n + n) % n;
            next[idx] = (1.0 - th) * tmp[base + static_cast<std::size_t>(j0) * stride[d]] +
                        th * tmp[base + static_cast<std::size_t>(j1) * stride[d]];
        }
        tmp.swap(next);
    }
    std::copy(tmp.begin(), tmp.end(), out);
}

DistField build_initial(const SolverConfig& cfg, const SolverOperators& ops) {
    const VelocityGrid& g = ops.grid;
    const int nx = cfg.spatial == SpatialMode::Periodic ? cfg.n_x : 1;
    DistField f;
    f.regime = cfg.regime;
    f.values.resize(static_cast<Eigen::Index>(g.size()), cfg.spatial_cells());
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j)
            for (int k = 0; k < nx; ++k) {
                const Eigen::Index x = (static_cast<Eigen::Index>(i) * nx + j) * nx + k;
                const double s = spatial_profile(cfg, i, j, k);
                for (std::size_t a = 0; a < g.size(); ++a)
                    f.values(static_cast<Eigen::Index>(a), x) =
                        cfg.init.amplitude * velocity_profile(cfg.init.profile, g.center(a)) * s;
            }
    if (cfg.init.zero_mean_projection) {
        const Eigen::VectorXd mean = f.values.rowwise().mean();
        const Eigen::VectorXd macro = ops.projector->project(mean);
        f.values.colwise() -= macro;
    }
    std::size_t neg = 0;
    check_positivity(f.values, ops, neg);
    if (neg > 0) throw Error(Errc::NegativeDensity, "build_initial: J + sqrt(J) f < 0 in " + std::to_string(neg) + " cells");
    return f;
}

Stepper::Stepper(const SolverConfig& cfg, std::shared_ptr<const SolverOperators> ops) : cfg_(cfg), ops_(std::move(ops)) {
    const Eigen::ArrayXd nu = ops_->nu.array();
    damp_ = (-nu * cfg.dt).exp();
    phi_ = (1.0 - damp_) / nu;
    gamma_quad_ = CollisionQuadrature::make(cfg.gamma_omega_polar, cfg.gamma_omega_azimuth, cfg.gamma_q_stride);
}

Eigen::MatrixXd Stepper::collision_term(const DistField& state) {
    Eigen::MatrixXd g = ops_->K * state.values;
    if (cfg_.nonlinear) {
        if (steps_ % std::max(1, cfg_.gamma_refresh) == 0 || gamma_cache_.size() == 0) {
            gamma_cache_.resize(state.values.rows(), state.values.cols());
            for (Eigen::Index x = 0; x < state.values.cols(); ++x) {
                const Eigen::VectorXd col = state.values.col(x);
                gamma_cache_.col(x) = gamma(ops_->regime, ops_->grid, col, col, gamma_quad_).total();
            }
        }
        g += gamma_cache_;
    }
    return g;
}

DistField Stepper::step(const DistField& state) {
    if (steps_ == 0) {
        initial_sup_ = state.values.cwiseAbs().maxCoeff();
        initial_moments_ = state.values.rowwise().mean().transpose() * ops_->psi_weights;
    }
    const Eigen::MatrixXd g = collision_term(state);
    const Eigen::MatrixXd gmid = steps_ == 0 ? g : Eigen::MatrixXd(1.5 * g - 0.5 * prev_g_);
    DistField next;
    next.regime = state.regime;
    next.time = state.time + cfg_.dt;
    if (cfg_.spatial == SpatialMode::Periodic) {
        Eigen::MatrixXd fs, gs;
        shift_rows(state.values, fs, *ops_, cfg_, cfg_.dt);
        shift_rows(gmid, gs, *ops_, cfg_, 0.5 * cfg_.dt);
        next.values = damp_.matrix().asDiagonal() * fs + phi_.matrix().asDiagonal() * gs;
    } else {
        next.values = damp_.matrix().asDiagonal() * state.values + phi_.matrix().asDiagonal() * gmid;
    }
    prev_g_ = g;
    ++steps_;
    last_fixup_ = 0.0;
    if (cfg_.conservation_fixup) {
        const MacroProjector& pr = *ops_->projector;
        const Eigen::VectorXd mean = next.values.rowwise().mean();
        // drift in the conserved moments, removed by an orthogonal correction in span{e_i}
        const Eigen::RowVectorXd drift = mean.transpose() * ops_->psi_weights - initial_moments_;
        last_fixup_ = drift.norm();
        const Eigen::MatrixXd gram_psi = pr.basis().transpose() * ops_->psi_weights;  // 5x5
        const Eigen::VectorXd coef = gram_psi.transpose().fullPivLu().solve(drift.transpose());
        next.values.colwise() -= pr.basis() * coef;
    }
    if (!next.values.allFinite()) throw Error(Errc::Blowup, "step: non-finite values");
    const double sup = next.values.cwiseAbs().maxCoeff();
    if (initial_sup_ > 0.0 && sup > 1e3 * initial_sup_)
        throw Error(Errc::Blowup, "step: ||f||_inf exceeded 1e3 times its initial value");
    if (cfg_.check_positivity) check_positivity(next.values, *ops_, negative_cells_);
    return next;
}

std::array<double, 5> conserved_moments(const DistField& state, const SolverOperators& ops) {
    const Eigen::RowVectorXd m = state.values.rowwise().mean().transpose() * ops.psi_weights;
    return {m(0), m(1), m(2), m(3), m(4)};
}

double weighted_sup_norm(const DistField& state, const VelocityGrid& grid, double beta) {
    double s = 0.0;
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const double w = weight(grid.center(a), beta);
        s = std::max(s, w * state.values.row(static_cast<Eigen::Index>(a)).cwiseAbs().maxCoeff());
    }
    return s;
}

RunResult run(const SolverConfig& cfg, std::shared_ptr<const SolverOperators> ops, const DistField* initial) {
    if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) throw Error(Errc::InvalidInput, "run: dt and t_end must be positive");
    if (cfg.spatial == SpatialMode::Periodic && (cfg.n_x < 2 || !(cfg.length > 0.0)))
        throw Error(Errc::InvalidInput, "run: periodic mode needs n_x >= 2 and a positive length");
    if (!ops) ops = std::make_shared<SolverOperators>(cfg.regime, cfg.grid(), cfg.nu_quad);
    if (!ops->grid.same_as(cfg.grid())) throw Error(Errc::GridMismatch, "run: operators built on another grid");
    const double nu_max = ops->nu.maxCoeff();
    if (cfg.dt > 0.5 / nu_max)
        throw Error(Errc::InvalidInput, "run: dt exceeds the stability guard 0.5/nu_max = " + fmt_double(0.5 / nu_max));
    RunResult res;
    DistField f;
    if (initial) {
        if (initial->values.rows() != static_cast<Eigen::Index>(ops->grid.size()) ||
            initial->values.cols() != cfg.spatial_cells())
            throw Error(Errc::GridMismatch, "run: initial data shape does not match the grids");
        f = *initial;
        f.time = 0.0;
        f.regime = cfg.regime;
    } else {
        f = build_initial(cfg, *ops);
    }
    Stepper stepper(cfg, ops);
    const long steps = std::lround(cfg.t_end / cfg.dt);
    auto record = [&](const DistField& s, double fix) {
        TimeSample ts;
        ts.t = s.time;
        ts.sup_norm = weighted_sup_norm(s, ops->grid, cfg.beta());
        ts.moments = conserved_moments(s, *ops);
        ts.fixup_magnitude = fix;
        res.series.push_back(ts);
        for (double t : cfg.snapshot_times)
            if (std::abs(s.time - t) <= 0.5 * cfg.dt) res.snapshots.push_back(s);
    };
    record(f, 0.0);
    for (long n = 1; n <= steps; ++n) {
        f = stepper.step(f);
        f.time = n * cfg.dt;
        record(f, stepper.last_fixup());
    }
    res.final_state = f;
    res.negative_cells = stepper.negative_cells();
    return res;
}

double decay_slope(const std::vector<TimeSample>& series, double t0, double t1) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : series) {
        if (s.t < t0 - 1e-12 || s.t > t1 + 1e-12) continue;
        if (!(s.sup_norm > 0.0)) throw Error(Errc::NonPositiveValue, "decay_slope: non-positive sup norm");
        const double y = std::log(s.sup_norm);
        n += 1;
        sx += s.t;
        sy += y;
        sxx += s.t * s.t;
        sxy += s.t * y;
    }
    if (n < 2) throw Error(Errc::InvalidInput, "decay_slope: fewer than two samples in the window");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_time_series_csv(const std::string& path, const std::vector<TimeSample>& series, const std::string& hash) {
    CsvWriter w(path, hash, {"t", "sup_norm", "M", "J1", "J2", "J3", "E", "fixup_magnitude"});
    for (const auto& s : series)
        w.row({fmt_double(s.t), fmt_double(s.sup_norm), fmt_double(s.moments[0]), fmt_double(s.moments[1]),
               fmt_double(s.moments[2]), fmt_double(s.moments[3]), fmt_double(s.moments[4]),
               fmt_double(s.fixup_magnitude)});
    w.commit();
}

void write_snapshot_csv(const std::string& path, const std::vector<DistField>& snapshots, const VelocityGrid& grid,
                        int n_x, const std::string& hash) {
    CsvWriter w(path, hash, {"t", "xi", "xj", "xk", "pi", "pj", "pk", "f"});
    for (const auto& s : snapshots) {
        const int nx = s.values.cols() == 1 ? 1 : n_x;
        for (Eigen::Index x = 0; x < s.values.cols(); ++x) {
            const int xi = static_cast<int>(x) / (nx * nx), xj = (static_cast<int>(x) / nx) % nx, xk = static_cast<int>(x) % nx;
            for (std::size_t a = 0; a < grid.size(); ++a) {
                int i, j, k;
                grid.lattice(a, i, j, k);
                w.row({fmt_double(s.time), std::to_string(xi), std::to_string(xj), std::to_string(xk), std::to_string(i),
                       std::to_string(j), std::to_string(k), fmt_double(s.values(static_cast<Eigen::Index>(a), x))});
            }
        }
    }
    w.commit();
}

}  // namespace relkin
