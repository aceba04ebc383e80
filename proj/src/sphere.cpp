#include "sbs/sphere.hpp"

namespace sbs {

double chordal_distance(const SpherePoint& p, const SpherePoint& q) {
    const auto a = p.homogeneous();
    const auto b = q.homogeneous();
    // |p0 q1 - p1 q0| with unit lifts; clamp against rounding above 1.
    const double d = std::abs(a[0] * b[1] - a[1] * b[0]);
    return d > 1.0 ? 1.0 : d;
}

double fs_area_density(const SpherePoint& p, double scale) {
    if (!(scale > 0.0)) throw_invalid_input("fs_area_density: scale must be positive");
    const double den = 1.0 + std::norm(p.coord);
    return scale / (M_PI * den * den);
}

} // namespace sbs
