#pragma once

#include <vector>

#include "relkin/vec3.hpp"

namespace relkin {

/// Product rule on S^2: Gauss-Legendre in cos(theta) on each hemisphere
/// (polar_order/2 nodes on [-1,0] and on [0,1]) times uniform azimuth.
/// Nodes are stored in a canonical frame and rotated onto an axis per use,
/// so that the kink of |omega . axis| at the equator is integrated exactly.
struct SphereRule {
    int polar_order = 16;
    int azimuth = 32;
    std::vector<double> ct, st, cp, sp, w;

    std::size_t size() const { return w.size(); }
};

SphereRule make_sphere_rule(int polar_order = 16, int azimuth = 32);

struct Frame {
    Vec3 e1, e2, e3;
};

/// Orthonormal frame with e3 along axis (axis need not be normalised, must be nonzero).
Frame frame_about(const Vec3& axis);

inline Vec3 sphere_node(const Frame& f, const SphereRule& r, std::size_t k) {
    return r.ct[k] * f.e3 + (r.st[k] * r.cp[k]) * f.e1 + (r.st[k] * r.sp[k]) * f.e2;
}

}  // namespace relkin
