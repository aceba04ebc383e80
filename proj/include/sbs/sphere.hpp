#pragma once

#include <array>
#include <complex>
#include <cmath>

#include "sbs/errors.hpp"

namespace sbs {

using Complex = std::complex<double>;

/// Two-chart atlas of the projective line: Affine0 carries z = z1/z0,
/// Affine1 carries w = z0/z1, glued by w = 1/z.
enum class Chart : int { Affine0 = 0, Affine1 = 1 };

inline Chart other_chart(Chart c) { return c == Chart::Affine0 ? Chart::Affine1 : Chart::Affine0; }

/// Hysteresis band for chart renormalization: a point keeps its chart while
/// |coord| <= 1 + kChartHysteresis, which prevents chart thrashing when a
/// flow oscillates around |coord| = 1.
inline constexpr double kChartHysteresis = 0.1;

/// A point of the sphere, stored in one affine chart.
struct SpherePoint {
    Chart chart = Chart::Affine0;
    Complex coord{0.0, 0.0};

    static SpherePoint affine(Complex z) { return SpherePoint{Chart::Affine0, z}.normalized(); }
    static SpherePoint inverted(Complex w) { return SpherePoint{Chart::Affine1, w}.normalized(); }
    static SpherePoint zero() { return {Chart::Affine0, {0.0, 0.0}}; }      // [1:0]
    static SpherePoint infinity() { return {Chart::Affine1, {0.0, 0.0}}; }  // [0:1]

    /// Move to the other chart. Undefined at the chart origin's antipode,
    /// so callers must not invert coord == 0.
    SpherePoint flipped() const {
        if (coord == Complex{0.0, 0.0})
            throw_invalid_input("chart transition w = 1/z undefined at coord = 0");
        return {other_chart(chart), 1.0 / coord};
    }

    /// Renormalize into the chart where the coordinate is smaller, with
    /// hysteresis: only switches once |coord| > 1 + kChartHysteresis.
    SpherePoint normalized() const {
        if (std::abs(coord) > 1.0 + kChartHysteresis) return flipped();
        return *this;
    }

    /// Coordinate of this point in the requested chart.
    Complex coord_in(Chart target) const {
        if (target == chart) return coord;
        return flipped().coord;
    }

    /// Unit homogeneous lift (z0, z1), chart-stable.
    std::array<Complex, 2> homogeneous() const {
        const double n = std::sqrt(1.0 + std::norm(coord));
        if (chart == Chart::Affine0) return {Complex{1.0 / n, 0.0}, coord / n};
        return {coord / n, Complex{1.0 / n, 0.0}};
    }

    /// Euclidean embedding on the unit 2-sphere ((0,0,-1) is [1:0]).
    std::array<double, 3> embed() const {
        const double r2 = std::norm(coord);
        const double den = 1.0 + r2;
        const double x = 2.0 * coord.real() / den;
        const double y = 2.0 * coord.imag() / den;
        const double h = (r2 - 1.0) / den;
        if (chart == Chart::Affine0) return {x, y, h};
        return {x, -y, -h};
    }
};

/// Tangent vector stored as a chart-coordinate velocity at its base point.
/// Chart transition acts by dw = -dz / z^2.
struct TangentVector {
    SpherePoint base;
    Complex value{0.0, 0.0};

    TangentVector in_chart(Chart target) const {
        if (target == base.chart) return *this;
        const Complex z = base.coord;
        if (z == Complex{0.0, 0.0})
            throw_invalid_input("tangent chart transition undefined at coord = 0");
        return {base.flipped(), -value / (z * z)};
    }
};

/// Fubini-Study chordal distance, computed from homogeneous lifts so that it
/// is chart-consistent. Range [0, 1], 1 at antipodes.
double chordal_distance(const SpherePoint& p, const SpherePoint& q);

/// Density of the area form against chart Lebesgue measure:
/// scale * (1/pi) * (1 + |coord|^2)^-2. Integrates to `scale` over the sphere.
double fs_area_density(const SpherePoint& p, double scale);

/// Squared pointwise metric density of the round metric compatible with the
/// area form at `scale` (conformal factor of dx^2 + dy^2).
inline double fs_metric_density(const SpherePoint& p, double scale) { return fs_area_density(p, scale); }

} // namespace sbs
