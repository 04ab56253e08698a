#include "relkin/limit_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "relkin/csv.hpp"
#include "relkin/error.hpp"
#include "relkin/kinematics.hpp"
#include "relkin/linear_ops.hpp"

namespace relkin {

std::string to_string(DistanceKind k) { return k == DistanceKind::L1pLinfx ? "L1p-Linfx" : "Linf-weighted"; }

DistanceKind parse_distance_kind(const std::string& s) {
    if (s == "L1p-Linfx") return DistanceKind::L1pLinfx;
    if (s == "Linf-weighted") return DistanceKind::LinfWeighted;
    throw Error(Errc::InvalidInput, "unknown distance kind '" + s + "'");
}

void SweepPlan::validate() const {
    if (c_values.size() < 4) throw Error(Errc::InvalidInput, "sweep: need at least 4 light speeds");
    for (std::size_t i = 0; i < c_values.size(); ++i) {
        if (!(c_values[i] > 0.0)) throw Error(Errc::InvalidInput, "sweep: light speeds must be positive");
        if (i > 0 && !(c_values[i] > c_values[i - 1]))
            throw Error(Errc::InvalidInput, "sweep: light speeds must be strictly increasing");
    }
    if (kinds.empty()) throw Error(Errc::InvalidInput, "sweep: no distance kind requested");
    if (std::find(kinds.begin(), kinds.end(), DistanceKind::LinfWeighted) != kinds.end() && !(beta > 8.0))
        throw Error(Errc::InvalidInput, "sweep: the weighted distance needs beta > 8");
    if (sample_times.empty()) throw Error(Errc::InvalidInput, "sweep: no sample times");
    for (double t : sample_times)
        if (!(t >= 0.0)) throw Error(Errc::InvalidInput, "sweep: sample times must be nonnegative");
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points, double floor) {
    if (points.size() < 3) throw Error(Errc::InvalidInput, "fit_rate: need at least 3 points");
    auto pts = points;
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [c, v] : pts) {
        if (!(c > 0.0)) throw Error(Errc::NonPositiveValue, "fit_rate: non-positive abscissa");
        if (!(v > 0.0)) throw Error(Errc::NonPositiveValue, "fit_rate: non-positive value " + fmt_double(v));
    }
    RateFit fit;
    const std::size_t n = pts.size();
    if (floor > 0.0 && n >= 5 && std::abs(pts[n - 1].second - pts[n - 2].second) < 3.0 * floor) {
        pts.resize(n - 2);
        fit.points_dropped = 2;
    }
    double sx = 0, sy = 0;
    for (const auto& [c, v] : pts) {
        fit.points.emplace_back(std::log(c), std::log(v));
        sx += fit.points.back().first;
        sy += fit.points.back().second;
    }
    const double m = static_cast<double>(pts.size());
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : fit.points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (!(sxx > 0.0)) throw Error(Errc::InvalidInput, "fit_rate: abscissae are all equal");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (const auto& [x, y] : fit.points)
        fit.max_residual = std::max(fit.max_residual, std::abs(y - fit.intercept - fit.slope * x));
    return fit;
}

namespace {

void require_same(const DistField& a, const DistField& b, const VelocityGrid& grid) {
    if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols() ||
        a.values.rows() != static_cast<Eigen::Index>(grid.size()))
        throw Error(Errc::GridMismatch, "distance: fields live on different grids");
}

}  // namespace

double distance_L1pLinfx(const DistField& fc, const DistField& f, const VelocityGrid& grid) {
    require_same(fc, f, grid);
    const Equilibrium ec(fc.regime), en(f.regime);
    double sum = 0.0;
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const Vec3& p = grid.center(a);
        const double jc = ec.value(p), sjc = ec.sqrt_value(p), jn = en.value(p), sjn = en.sqrt_value(p);
        const auto r = static_cast<Eigen::Index>(a);
        double m = 0.0;
        for (Eigen::Index x = 0; x < fc.values.cols(); ++x)
            m = std::max(m, std::abs((jc + sjc * fc.values(r, x)) - (jn + sjn * f.values(r, x))));
        sum += m;
    }
    return sum * grid.cell_volume();
}

double distance_Linf_weighted(const DistField& fc, const DistField& f, const VelocityGrid& grid, double beta) {
    require_same(fc, f, grid);
    double m = 0.0;
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const auto r = static_cast<Eigen::Index>(a);
        const double w = weight(grid.center(a), beta - 6.0);
        m = std::max(m, w * (fc.values.row(r) - f.values.row(r)).cwiseAbs().maxCoeff());
    }
    return m;
}

double distance(DistanceKind k, const DistField& fc, const DistField& f, const VelocityGrid& grid, double beta) {
    return k == DistanceKind::L1pLinfx ? distance_L1pLinfx(fc, f, grid) : distance_Linf_weighted(fc, f, grid, beta);
}

namespace {

const DistField& snapshot_at(const RunResult& r, double t) {
    const DistField* best = nullptr;
    for (const auto& s : r.snapshots)
        if (!best || std::abs(s.time - t) < std::abs(best->time - t)) best = &s;
    if (!best) throw Error(Errc::InvalidInput, "sweep: run produced no snapshots");
    return *best;
}

RunResult run_regime(const EquilibriumSpec& spec, const SolverConfig& templ, const DistField& f0) {
    SolverConfig cfg = templ;
    cfg.regime = spec;
    auto ops = std::make_shared<const SolverOperators>(spec, cfg.grid(), cfg.nu_quad);
    return run(cfg, ops, &f0);
}

}  // namespace

SweepResult sweep(const SweepPlan& plan, const SolverConfig& templ) {
    plan.validate();
    SolverConfig cfg = templ;
    cfg.init = plan.init;
    cfg.snapshot_times = plan.sample_times;
    cfg.t_end = *std::max_element(plan.sample_times.begin(), plan.sample_times.end());
    cfg.regime = EquilibriumSpec::newtonian_limit(plan.beta);

    SweepResult out;
    RunResult newton;
    DistField f0;
    {
        auto ops = std::make_shared<const SolverOperators>(cfg.regime, cfg.grid(), cfg.nu_quad);
        f0 = build_initial(cfg, *ops);
        newton = run(cfg, ops, &f0);
    }
    const VelocityGrid grid = cfg.grid();

    // (kind, time index) -> floor estimate
    std::map<std::pair<int, std::size_t>, double> floors;
    if (plan.floor_c > 0.0) {
        const RunResult far = run_regime(EquilibriumSpec::relativistic(plan.floor_c, plan.beta), cfg, f0);
        for (std::size_t ik = 0; ik < plan.kinds.size(); ++ik)
            for (std::size_t it = 0; it < plan.sample_times.size(); ++it) {
                const double t = plan.sample_times[it];
                const double d = distance(plan.kinds[ik], snapshot_at(far, t), snapshot_at(newton, t), grid, plan.beta);
                floors[{static_cast<int>(ik), it}] = d;
                out.floor = std::max(out.floor, d);
            }
    }

    std::vector<double> done;
    for (double c : plan.c_values) {
        RunResult rel;
        try {
            rel = run_regime(EquilibriumSpec::relativistic(c, plan.beta), cfg, f0);
        } catch (const Error& e) {
            out.error = "c=" + fmt_double(c) + ": " + e.what();
            break;
        }
        for (std::size_t it = 0; it < plan.sample_times.size(); ++it)
            for (DistanceKind k : plan.kinds) {
                const double t = plan.sample_times[it];
                out.distances.push_back(
                    {c, t, k, distance(k, snapshot_at(rel, t), snapshot_at(newton, t), grid, plan.beta)});
            }
        done.push_back(c);
    }

    for (std::size_t ik = 0; ik < plan.kinds.size(); ++ik)
        for (std::size_t it = 0; it < plan.sample_times.size(); ++it) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& row : out.distances)
                if (row.kind == plan.kinds[ik] && row.t == plan.sample_times[it]) pts.emplace_back(row.c, row.value);
            if (pts.size() < 3) continue;
            const auto f = floors.find({static_cast<int>(ik), it});
            const double fl = f == floors.end() ? 0.0 : f->second;
            try {
                out.summary.push_back({plan.kinds[ik], plan.sample_times[it], fit_rate(pts, fl)});
            } catch (const Error& e) {
                if (out.error.empty()) out.error = e.what();
            }
        }
    return out;
}

void write_sweep_csv(const std::string& path, const SweepResult& r, const std::string& hash) {
    CsvWriter w(path, hash, {"c", "t", "distance_kind", "value"});
    for (const auto& d : r.distances) w.row({fmt_double(d.c), fmt_double(d.t), to_string(d.kind), fmt_double(d.value)});
    w.commit();
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows, const std::string& hash) {
    CsvWriter w(path, hash, {"distance_kind", "t", "slope", "max_residual", "points_used", "points_dropped"});
    for (const auto& s : rows)
        w.row({to_string(s.kind), fmt_double(s.t), fmt_double(s.fit.slope), fmt_double(s.fit.max_residual),
               std::to_string(s.fit.points.size()), std::to_string(s.fit.points_dropped)});
    w.commit();
}

std::vector<SummaryRow> summarize_sweep_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    const std::vector<std::string> want{"c", "t", "distance_kind", "value"};
    if (t.header != want) throw Error(Errc::InvalidInput, "rates: '" + path + "' is not a sweep CSV");
    if (t.rows.empty()) throw Error(Errc::InvalidInput, "rates: '" + path + "' has no data rows");
    std::vector<std::pair<DistanceKind, double>> keys;
    std::map<std::pair<DistanceKind, double>, std::vector<std::pair<double, double>>> groups;
    for (const auto& row : t.rows) {
        if (row.size() != 4) throw Error(Errc::InvalidInput, "rates: malformed row in '" + path + "'");
        double c, tt, v;
        try {
            c = std::stod(row[0]);
            tt = std::stod(row[1]);
            v = std::stod(row[3]);
        } catch (const std::exception&) {
            throw Error(Errc::InvalidInput, "rates: non-numeric field in '" + path + "'");
        }
        const auto key = std::make_pair(parse_distance_kind(row[2]), tt);
        if (!groups.count(key)) keys.push_back(key);
        groups[key].emplace_back(c, v);
    }
    std::vector<SummaryRow> out;
    for (const auto& k : keys) out.push_back({k.first, k.second, fit_rate(groups[k])});
    return out;
}

std::vector<KernelSample> kernel_sample_set(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    auto uni = [&] { return (static_cast<double>(rng()) + 0.5) / 4294967296.0 * 2.0 - 1.0; };
    auto in_ball = [&](double r) {
        for (;;) {
            const Vec3 v{uni(), uni(), uni()};
            if (norm2(v) <= 1.0) return v * r;
        }
    };
    std::vector<KernelSample> out;
    while (out.size() < n) {
        KernelSample s{in_ball(5.0), in_ball(5.0), {}};
        if (norm(s.p - s.q) < 0.5) continue;
        Vec3 w;
        do w = in_ball(1.0);
        while (norm(w) < 0.1);
        s.omega = w / norm(w);
        out.push_back(s);
    }
    return out;
}

KernelSweep kernel_sweep(const std::vector<double>& c_values, const std::vector<KernelSample>& sample) {
    std::vector<std::pair<double, double>> kern, scat, vel;
    for (double c : c_values) {
        double mk = 0, ms = 0, mv = 0;
        for (const auto& s : sample) {
            mk = std::max(mk, std::abs(kernel_k_rel(s.p, s.q, c) - kernel_k_newton(s.p, s.q)));
            ms = std::max(ms, norm(scatter_gs(s.p, s.q, s.omega, c).p_out - scatter_newton(s.p, s.q, s.omega).p_out));
            mv = std::max({mv, norm(s.p - velocity_hat(s.p, c)), norm(s.q - velocity_hat(s.q, c))});
        }
        kern.emplace_back(c, mk);
        scat.emplace_back(c, ms);
        vel.emplace_back(c, mv);
    }
    return {fit_rate(kern), fit_rate(scat), fit_rate(vel)};
}

double grad_x_norm(const DistField& f, const VelocityGrid& grid, int n_x, double length, double beta) {
    if (f.values.cols() == 1) return 0.0;
    if (f.values.cols() != static_cast<Eigen::Index>(n_x) * n_x * n_x)
        throw Error(Errc::GridMismatch, "grad_x_norm: spatial size does not match n_x");
    const double inv2dx = n_x / (2.0 * length);
    auto idx = [n_x](int i, int j, int k) {
        auto m = [n_x](int v) { return ((v % n_x) + n_x) % n_x; };
        return (static_cast<Eigen::Index>(m(i)) * n_x + m(j)) * n_x + m(k);
    };
    double out = 0.0;
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const auto r = static_cast<Eigen::Index>(a);
        const double w = weight(grid.center(a), beta - 1.0);
        for (int i = 0; i < n_x; ++i)
            for (int j = 0; j < n_x; ++j)
                for (int k = 0; k < n_x; ++k) {
                    const double gx = (f.values(r, idx(i + 1, j, k)) - f.values(r, idx(i - 1, j, k))) * inv2dx;
                    const double gy = (f.values(r, idx(i, j + 1, k)) - f.values(r, idx(i, j - 1, k))) * inv2dx;
                    const double gz = (f.values(r, idx(i, j, k + 1)) - f.values(r, idx(i, j, k - 1))) * inv2dx;
                    out = std::max(out, w * std::sqrt(gx * gx + gy * gy + gz * gz));
                }
    }
    return out;
}

double grad_p_norm(const DistField& f, const VelocityGrid& grid, double beta) {
    if (f.values.rows() != static_cast<Eigen::Index>(grid.size()))
        throw Error(Errc::GridMismatch, "grad_p_norm: velocity size does not match the grid");
    const double h = grid.spacing();
    double out = 0.0;
    for (std::size_t a = 0; a < grid.size(); ++a) {
        int l[3];
        grid.lattice(a, l[0], l[1], l[2]);
        int nb[3][2];
        for (int d = 0; d < 3; ++d)
            for (int s = 0; s < 2; ++s) {
                int m[3] = {l[0], l[1], l[2]};
                m[d] += s == 0 ? -1 : 1;
                nb[d][s] = grid.index(m[0], m[1], m[2]);
            }
        const double w = weight(grid.center(a), beta - 2.0);
        const auto r = static_cast<Eigen::Index>(a);
        for (Eigen::Index x = 0; x < f.values.cols(); ++x) {
            double g2 = 0.0;
            for (int d = 0; d < 3; ++d) {
                const int lo = nb[d][0], hi = nb[d][1];
                double g = 0.0;
                if (lo >= 0 && hi >= 0)
                    g = (f.values(hi, x) - f.values(lo, x)) / (2.0 * h);
                else if (hi >= 0)
                    g = (f.values(hi, x) - f.values(r, x)) / h;
                else if (lo >= 0)
                    g = (f.values(r, x) - f.values(lo, x)) / h;
                g2 += g * g;
            }
            out = std::max(out, w * std::sqrt(g2));
        }
    }
    return out;
}

GradientReport gradient_decay(const std::vector<DistField>& snapshots, const VelocityGrid& grid, int n_x, double length,
                              double beta) {
    if (snapshots.size() < 5) throw Error(Errc::InvalidInput, "gradient_decay: need snapshots at >= 5 times");
    GradientReport rep;
    for (const auto& s : snapshots)
        rep.series.push_back({s.time, grad_x_norm(s, grid, n_x, length, beta), grad_p_norm(s, grid, beta)});
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool finite_log = true;
    for (const auto& g : rep.series) {
        if (!(g.grad_x > 0.0)) {
            finite_log = false;
            break;
        }
        const double y = std::log(g.grad_x);
        n += 1;
        sx += g.t;
        sy += y;
        sxx += g.t * g.t;
        sxy += g.t * y;
    }
    rep.x_slope = finite_log ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
    const double p0 = rep.series.front().grad_p;
    double pm = 0.0;
    for (const auto& g : rep.series) pm = std::max(pm, g.grad_p);
    rep.p_ratio = p0 > 0.0 ? pm / p0 : (pm > 0.0 ? INFINITY : 1.0);
    rep.ok = finite_log && rep.x_slope < 0.0 && rep.p_ratio <= 5.0;
    return rep;
}

}  // namespace relkin
