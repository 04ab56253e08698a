#include "relkin/sphere.hpp"

#include <cmath>
#include <numbers>

#include "relkin/error.hpp"
#include "relkin/quadrature.hpp"

namespace relkin {

SphereRule make_sphere_rule(int polar_order, int azimuth) {
    if (polar_order < 2 || polar_order % 2 != 0 || azimuth < 1)
        throw Error(Errc::InvalidInput, "sphere rule: polar order must be even and >= 2, azimuth >= 1");
    SphereRule r;
    r.polar_order = polar_order;
    r.azimuth = azimuth;
    Rule1D lo = gauss_legendre(polar_order / 2, -1.0, 0.0), hi = gauss_legendre(polar_order / 2, 0.0, 1.0);
    std::vector<double> mu = lo.x, wm = lo.w;
    mu.insert(mu.end(), hi.x.begin(), hi.x.end());
    wm.insert(wm.end(), hi.w.begin(), hi.w.end());
    const double dphi = 2.0 * std::numbers::pi / azimuth;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double s = std::sqrt((1.0 - mu[i]) * (1.0 + mu[i]));
        for (int k = 0; k < azimuth; ++k) {
            const double phi = (k + 0.5) * dphi;
            r.ct.push_back(mu[i]);
            r.st.push_back(s);
            r.cp.push_back(std::cos(phi));
            r.sp.push_back(std::sin(phi));
            r.w.push_back(wm[i] * dphi);
        }
    }
    return r;
}

Frame frame_about(const Vec3& axis) {
    Frame f;
    f.e3 = axis / norm(axis);
    Vec3 t = std::abs(f.e3.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    f.e1 = cross(f.e3, t);
    f.e1 = f.e1 / norm(f.e1);
    f.e2 = cross(f.e3, f.e1);
    return f;
}

}  // namespace relkin
