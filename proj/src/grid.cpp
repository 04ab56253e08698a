#include "relkin/grid.hpp"

#include <cmath>

#include "relkin/error.hpp"

namespace relkin {

VelocityGrid::VelocityGrid(double radius, int n_per_axis) : radius_(radius), n_(n_per_axis) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(Errc::InvalidInput, "grid radius must be positive");
    if (n_per_axis < 1 || n_per_axis % 2 == 0) throw Error(Errc::InvalidInput, "grid n_per_axis must be odd");
    h_ = 2.0 * radius / n_per_axis;
    half_ = 0.5 * (n_per_axis - 1);
}

bool VelocityGrid::in_ball(int i, int j, int k) const {
    double x = coord(i), y = coord(j), z = coord(k);
    return x * x + y * y + z * z <= radius_ * radius_ * (1.0 + 1e-12);
}

const VelocityGrid::Cells& VelocityGrid::cells() const {
    if (!cells_) {
        auto c = std::make_shared<Cells>();
        const std::size_t n = static_cast<std::size_t>(n_);
        c->lookup.assign(n * n * n, -1);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k) {
                    if (!in_ball(i, j, k)) continue;
                    c->lookup[(static_cast<std::size_t>(i) * n + j) * n + k] = static_cast<int>(c->centers.size());
                    c->centers.push_back({coord(i), coord(j), coord(k)});
                    c->triples.insert(c->triples.end(), {i, j, k});
                }
        cells_ = std::move(c);
    }
    return *cells_;
}

int VelocityGrid::index(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= n_ || j >= n_ || k >= n_) return -1;
    const std::size_t n = static_cast<std::size_t>(n_);
    return cells().lookup[(static_cast<std::size_t>(i) * n + j) * n + k];
}

void VelocityGrid::lattice(std::size_t a, int& i, int& j, int& k) const {
    const auto& t = cells().triples;
    i = t[3 * a];
    j = t[3 * a + 1];
    k = t[3 * a + 2];
}

double VelocityGrid::interpolate(const double* values, const Vec3& p) const {
    const double tx = p.x / h_ + half_, ty = p.y / h_ + half_, tz = p.z / h_ + half_;
    const double fx = std::floor(tx), fy = std::floor(ty), fz = std::floor(tz);
    const int i0 = static_cast<int>(fx), j0 = static_cast<int>(fy), k0 = static_cast<int>(fz);
    if (i0 < -1 || j0 < -1 || k0 < -1 || i0 >= n_ || j0 >= n_ || k0 >= n_) return 0.0;
    const double ax = tx - fx, ay = ty - fy, az = tz - fz;
    const double wx[2] = {1.0 - ax, ax}, wy[2] = {1.0 - ay, ay}, wz[2] = {1.0 - az, az};
    const Cells& c = cells();
    const std::size_t n = static_cast<std::size_t>(n_);
    double v = 0.0;
    for (int di = 0; di < 2; ++di) {
        int i = i0 + di;
        if (i < 0 || i >= n_) continue;
        for (int dj = 0; dj < 2; ++dj) {
            int j = j0 + dj;
            if (j < 0 || j >= n_) continue;
            const std::size_t base = (static_cast<std::size_t>(i) * n + j) * n;
            for (int dk = 0; dk < 2; ++dk) {
                int k = k0 + dk;
                if (k < 0 || k >= n_) continue;
                int a = c.lookup[base + k];
                if (a >= 0) v += wx[di] * wy[dj] * wz[dk] * values[a];
            }
        }
    }
    return v;
}

namespace {

void lagrange4(double t, double w[4]) {
    w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
}

}  // namespace

double VelocityGrid::interpolate_cubic(const double* values, const Vec3& p) const {
    const double tx = p.x / h_ + half_, ty = p.y / h_ + half_, tz = p.z / h_ + half_;
    const double fx = std::floor(tx), fy = std::floor(ty), fz = std::floor(tz);
    const int i0 = static_cast<int>(fx) - 1, j0 = static_cast<int>(fy) - 1, k0 = static_cast<int>(fz) - 1;
    if (i0 < -3 || j0 < -3 || k0 < -3 || i0 >= n_ || j0 >= n_ || k0 >= n_) return 0.0;
    double wx[4], wy[4], wz[4];
    lagrange4(tx - fx, wx);
    lagrange4(ty - fy, wy);
    lagrange4(tz - fz, wz);
    const Cells& c = cells();
    const std::size_t n = static_cast<std::size_t>(n_);
    double v = 0.0;
    for (int di = 0; di < 4; ++di) {
        const int i = i0 + di;
        if (i < 0 || i >= n_) continue;
        for (int dj = 0; dj < 4; ++dj) {
            const int j = j0 + dj;
            if (j < 0 || j >= n_) continue;
            const std::size_t base = (static_cast<std::size_t>(i) * n + j) * n;
            double vz = 0.0;
            for (int dk = 0; dk < 4; ++dk) {
                const int k = k0 + dk;
                if (k < 0 || k >= n_) continue;
                const int a = c.lookup[base + k];
                if (a >= 0) vz += wz[dk] * values[a];
            }
            v += wx[di] * wy[dj] * vz;
        }
    }
    return v;
}

}  // namespace relkin
