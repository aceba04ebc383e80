#include "sbs/loops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "sbs/numerics.hpp"

namespace sbs {

namespace {

// Per-sample kinematics shared by the loop integrals: unit-sphere embedding,
// spectral tangent, chart velocity, and the stable 1-Z factor.
struct LoopKinematics {
    std::vector<SpherePoint> pts;
    std::vector<Complex> u;       // X + iY on the unit sphere
    std::vector<double> zc;       // Z
    std::vector<Complex> udot;
    std::vector<double> zdot;
    std::vector<double> one_minus_z; // computed chart-locally, stable near Z = 1
    std::vector<double> speed3;      // |P'(t)| on the unit sphere

    std::size_t size() const { return pts.size(); }

    Complex chart_velocity(std::size_t k) const {
        const SpherePoint& p = pts[k];
        if (p.chart == Chart::Affine0) {
            const double omz = one_minus_z[k];
            return (udot[k] * omz + u[k] * zdot[k]) / (omz * omz);
        }
        const double opz = 1.0 + zc[k];
        return (std::conj(udot[k]) * opz - std::conj(u[k]) * zdot[k]) / (opz * opz);
    }
};

LoopKinematics loop_kinematics(const LoopCurve& loop) {
    const std::size_t n = loop.size();
    LoopKinematics kin;
    kin.pts.reserve(n);
    for (const auto& p : loop.samples) kin.pts.push_back(p.normalized());
    kin.u.resize(n);
    kin.zc.resize(n);
    kin.one_minus_z.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto e = kin.pts[k].embed();
        kin.u[k] = Complex{e[0], e[1]};
        kin.zc[k] = e[2];
        const double r2 = std::norm(kin.pts[k].coord);
        kin.one_minus_z[k] = (kin.pts[k].chart == Chart::Affine0) ? 2.0 / (1.0 + r2)
                                                                  : 2.0 * r2 / (1.0 + r2);
    }
    std::vector<Complex> zs(n);
    for (std::size_t k = 0; k < n; ++k) zs[k] = Complex{kin.zc[k], 0.0};
    const auto du = num::spectral_derivative(kin.u);
    const auto dz = num::spectral_derivative(zs);
    kin.udot = du;
    kin.zdot.resize(n);
    kin.speed3.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        kin.zdot[k] = dz[k].real();
        kin.speed3[k] = std::sqrt(std::norm(kin.udot[k]) + kin.zdot[k] * kin.zdot[k]);
    }
    return kin;
}

double action_from_kinematics(const BinaryForm& form, const LoopKinematics& kin) {
    const std::size_t n = kin.size();
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Complex rho = rho_coefficient(form, kin.pts[k]);
        acc += -(rho * kin.chart_velocity(k)).imag();
    }
    return acc * 2.0 * M_PI / static_cast<double>(n);
}

LoopCurve decimated(const LoopCurve& loop) {
    LoopCurve half;
    half.samples.reserve(loop.size() / 2);
    for (std::size_t k = 0; k < loop.size(); k += 2) half.samples.push_back(loop.samples[k]);
    return half;
}

} // namespace

void validate_loop(const BinaryForm& form, const LoopCurve& loop) {
    const std::size_t n = loop.size();
    if (n < 64) throw_invalid_input("loop: need at least 64 samples");
    if (!num::is_power_of_two(n)) throw_invalid_input("loop: sample count must be a power of two");
    for (const auto& p : loop.samples)
        if (p.chart == Chart::Affine1 && p.coord == Complex{0.0, 0.0})
            throw_invalid_input("loop: sample at [0:1] is outside the supported chart anchor");
    const Divisor div = divisor_roots(form);
    for (const auto& p : loop.samples)
        for (const auto& e : div.points)
            if (chordal_distance(p, e.point) < 1e-6)
                throw_invalid_input("loop: sample within chordal 1e-6 of the divisor");
    for (std::size_t k = 0; k < n; ++k) {
        const double gap = chordal_distance(loop.samples[k], loop.samples[(k + 1) % n]);
        if (gap >= 0.05) throw_invalid_input("loop: adjacent sample gap exceeds 0.05");
    }
}

bool loop_is_embedded(const LoopCurve& loop) {
    const std::size_t n = loop.size();
    std::vector<Complex> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = loop.samples[k].coord_in(Chart::Affine0);
    const auto orient = [](Complex a, Complex b, Complex c) {
        const Complex ab = b - a, ac = c - a;
        const double cross = ab.real() * ac.imag() - ab.imag() * ac.real();
        return (cross > 0.0) - (cross < 0.0);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const Complex a = z[i], b = z[(i + 1) % n];
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue; // closing segment adjacency
            const Complex c = z[j], d = z[(j + 1) % n];
            if (orient(a, b, c) * orient(a, b, d) < 0 && orient(c, d, a) * orient(c, d, b) < 0)
                return false;
        }
    }
    return true;
}

double action_integral(const BinaryForm& form, const LoopCurve& loop) {
    validate_loop(form, loop);
    const double full = action_from_kinematics(form, loop_kinematics(loop));
    const double half = action_from_kinematics(form, loop_kinematics(decimated(loop)));
    if (std::abs(full - half) > 1e-6)
        throw_resolution_too_coarse("action_integral: Richardson check failed; refine the loop");
    return full;
}

namespace {

// accumulated argument turns of the Affine0-anchored difference, one entry
// per divisor point (not yet rounded)
std::vector<double> winding_turns(const Divisor& div, const std::vector<SpherePoint>& samples) {
    const std::size_t n = samples.size();
    std::vector<Complex> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = samples[k].coord_in(Chart::Affine0);
    std::vector<double> out;
    out.reserve(div.points.size());
    for (const auto& e : div.points) {
        const auto a = e.point.homogeneous();
        double theta = 0.0;
        Complex prev = z[0] * a[0] - a[1];
        for (std::size_t k = 1; k <= n; ++k) {
            const Complex cur = z[k % n] * a[0] - a[1];
            theta += std::arg(cur / prev);
            prev = cur;
        }
        out.push_back(theta / (2.0 * M_PI));
    }
    return out;
}

} // namespace

std::vector<int> winding_numbers(const BinaryForm& form, const LoopCurve& loop) {
    validate_loop(form, loop);
    const Divisor div = divisor_roots(form);
    const auto turns = winding_turns(div, loop.samples);
    std::vector<int> out;
    out.reserve(turns.size());
    for (const double t : turns) {
        const double nearest = std::round(t);
        if (std::abs(t - nearest) >= 0.05)
            throw_ambiguous_winding("winding_numbers: accumulated argument far from an integer");
        out.push_back(static_cast<int>(nearest));
    }
    return out;
}

double enclosed_area(const BinaryForm& form, const LoopCurve& loop) {
    if (!loop_is_embedded(loop)) throw_self_intersecting("enclosed_area: loop is not embedded");
    const double action = action_integral(form, loop);
    const auto winding = winding_numbers(form, loop);
    const Divisor div = divisor_roots(form);
    double wsum = 0.0;
    for (std::size_t j = 0; j < winding.size(); ++j)
        wsum += static_cast<double>(winding[j]) * div.points[j].multiplicity;
    return action / (2.0 * M_PI) + wsum;
}

double enclosed_area_quadrature(const LoopCurve& loop, double scale) {
    const LoopKinematics kin = loop_kinematics(loop);
    const std::size_t n = kin.size();
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        acc += (std::conj(kin.u[k]) * kin.udot[k]).imag() / kin.one_minus_z[k];
    return scale * acc / (2.0 * static_cast<double>(n));
}

Complex holonomy(const BinaryForm& form, const LoopCurve& loop) {
    return std::exp(Complex{0.0, -action_integral(form, loop)});
}

double loop_fs_length(const LoopCurve& loop, double scale) {
    const LoopKinematics kin = loop_kinematics(loop);
    const double radius = std::sqrt(scale / (4.0 * M_PI));
    double acc = 0.0;
    for (std::size_t k = 0; k < kin.size(); ++k) acc += kin.speed3[k];
    return radius * acc * 2.0 * M_PI / static_cast<double>(kin.size());
}

double loop_inner_product(const BinaryForm& form, const LoopCurve& loop, std::span<const double> f1,
                          std::span<const double> f2) {
    const std::size_t n = loop.size();
    if (f1.size() != n || f2.size() != n)
        throw_invalid_input("loop_inner_product: functions must be sampled at the loop resolution");
    const LoopKinematics kin = loop_kinematics(loop);
    const double radius = std::sqrt(static_cast<double>(form.degree) / (4.0 * M_PI));
    std::vector<double> mu(n);
    double length = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mu[k] = radius * kin.speed3[k] * 2.0 * M_PI / static_cast<double>(n);
        length += mu[k];
    }
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        m1 += f1[k] * mu[k];
        m2 += f2[k] * mu[k];
    }
    m1 /= length;
    m2 /= length;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += (f1[k] - m1) * (f2[k] - m2) * mu[k];
    return acc;
}

namespace {

// Rotation of the sphere sending 0 to `center` in the given chart; circles
// |zeta| = r map to round circles about the center.
SpherePoint mobius_point(Chart chart, Complex center, Complex zeta) {
    const Complex num = center + zeta;
    const Complex den = 1.0 - std::conj(center) * zeta;
    if (std::abs(den) <= 1e-300 * std::abs(num))
        return SpherePoint{other_chart(chart), Complex{0.0, 0.0}};
    if (std::abs(num) > std::abs(den)) return SpherePoint{other_chart(chart), den / num};
    return SpherePoint{chart, num / den};
}

LoopCurve circle_family_loop(Chart chart, Complex center, double radius, int n_samples) {
    LoopCurve loop;
    loop.samples.reserve(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k) {
        const double t = 2.0 * M_PI * k / n_samples;
        loop.samples.push_back(mobius_point(chart, center, radius * Complex{std::cos(t), std::sin(t)}));
    }
    return loop;
}

double loop_divisor_gap(const LoopCurve& loop, const Divisor& div, int skip_index) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < div.points.size(); ++j) {
        if (static_cast<int>(j) == skip_index) continue;
        for (const auto& p : loop.samples)
            best = std::min(best, chordal_distance(p, div.points[j].point));
    }
    return best;
}

} // namespace

namespace {

LoopCurve construct_exact_loop_at(const BinaryForm& form, int zero_index, const LoopOptions& opts,
                                  int n_samples) {
    const Divisor div = divisor_roots(form);
    if (zero_index < 0 || static_cast<std::size_t>(zero_index) >= div.points.size())
        throw_invalid_input("construct_exact_loop: zero index out of range");
    if (div.points[static_cast<std::size_t>(zero_index)].multiplicity != 1)
        throw_invalid_input("construct_exact_loop: indexed zero is not simple");
    const SpherePoint center = div.points[static_cast<std::size_t>(zero_index)].point;

    // A candidate radius is usable while the loop keeps its clearance from
    // the divisor and the disc around the zero has not absorbed any other
    // zero: every relative winding w[idx] - w[j] must stay 1 (and the cap
    // must not cross [0:1] when that point carries a zero).
    const auto try_action = [&](double r) -> std::optional<double> {
        const LoopCurve loop = circle_family_loop(center.chart, center.coord, r, n_samples);
        if (loop_divisor_gap(loop, div, zero_index) < opts.divisor_margin) return std::nullopt;
        for (const auto& p : loop.samples)
            if (chordal_distance(p, center) < 1e-6) return std::nullopt;
        const auto turns = winding_turns(div, loop.samples);
        std::vector<int> w(turns.size());
        for (std::size_t j = 0; j < turns.size(); ++j) {
            const double nearest = std::round(turns[j]);
            if (std::abs(turns[j] - nearest) >= 0.05) return std::nullopt;
            w[j] = static_cast<int>(nearest);
        }
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (static_cast<int>(j) == zero_index) continue;
            if (w[static_cast<std::size_t>(zero_index)] - w[j] != 1) return std::nullopt;
            const auto h = div.points[j].point.homogeneous();
            if (h[0] == Complex{0.0, 0.0} && w[static_cast<std::size_t>(zero_index)] != 1)
                return std::nullopt; // cap crossed the zero at [0:1]
        }
        return action_from_kinematics(form, loop_kinematics(loop));
    };

    double r_lo = 1e-3;
    auto a_lo = try_action(r_lo);
    while (!a_lo && r_lo > 1e-9) {
        r_lo *= 0.5;
        a_lo = try_action(r_lo);
    }
    if (!a_lo || *a_lo >= 0.0)
        throw_no_exact_radius("construct_exact_loop: no valid small-radius start for the circle family");

    // expand geometrically; once an invalid radius is met, bisect toward the
    // validity boundary looking for a positive action before the squeeze
    double r_hi = r_lo;
    std::optional<double> a_hi = a_lo;
    double bad = std::numeric_limits<double>::infinity();
    while (*a_hi <= 0.0) {
        double candidate =
            std::isinf(bad) ? std::min(r_hi * 1.25, opts.max_center_radius) : 0.5 * (r_hi + bad);
        if (candidate <= r_hi * (1.0 + 1e-12)) break;
        const auto a = try_action(candidate);
        if (!a) {
            bad = candidate;
            continue;
        }
        r_hi = candidate;
        a_hi = a;
        if (std::isinf(bad) && r_hi >= opts.max_center_radius) break;
    }
    if (!a_hi || *a_hi <= 0.0) {
        std::ostringstream msg;
        msg << "construct_exact_loop: action stays negative on the circle family (zero " << zero_index
            << ", bracket r in [" << r_lo << ", " << r_hi << "], action(hi) = "
            << (a_hi ? *a_hi : *a_lo) << ")";
        throw_no_exact_radius(msg.str());
    }

    double lo = r_lo, hi = r_hi;
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto a = try_action(mid);
        if (!a) throw_no_exact_radius("construct_exact_loop: family became invalid inside the bracket");
        (*a < 0.0 ? lo : hi) = mid;
    }
    const double r = 0.5 * (lo + hi);
    LoopCurve loop = circle_family_loop(center.chart, center.coord, r, n_samples);
    const double final_action = action_integral(form, loop);
    if (std::abs(final_action) > opts.action_tol)
        throw_no_exact_radius("construct_exact_loop: polished radius misses the action tolerance");
    return loop;
}

} // namespace

LoopCurve construct_exact_loop(const BinaryForm& form, int zero_index, const LoopOptions& opts) {
    // loops squeezing past a nearby zero need more samples for the spectral
    // quadrature; double until the Richardson guard is satisfied
    const int n_max = std::max(4096, opts.samples);
    for (int n = opts.samples; n <= n_max; n *= 2) {
        try {
            return construct_exact_loop_at(form, zero_index, opts, n);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ResolutionTooCoarse) throw;
            if (2 * n > n_max)
                // the family's sign change sits inside the quadrature noise of
                // a near-touch with another zero: no resolvable exact radius
                throw_no_exact_radius(
                    "construct_exact_loop: the circle family reaches zero action only within "
                    "quadrature noise of another zero (no resolvable exact radius)");
        }
    }
    throw_no_exact_radius("construct_exact_loop: unreachable");
}

LoopReport check_proposition(const BinaryForm& form, const LoopCurve& loop, double action_tol,
                             double area_tol) {
    validate_loop(form, loop);
    if (!loop_is_embedded(loop)) throw_self_intersecting("check_proposition: loop is not embedded");
    LoopReport rep;
    rep.action = action_integral(form, loop);
    rep.winding = winding_numbers(form, loop);
    rep.enclosed_area = enclosed_area_quadrature(loop, static_cast<double>(form.degree));
    rep.holonomy = std::exp(Complex{0.0, -rep.action});
    rep.fs_length = loop_fs_length(loop, static_cast<double>(form.degree));
    const Divisor div = divisor_roots(form);
    double wsum = 0.0;
    for (std::size_t j = 0; j < rep.winding.size(); ++j)
        wsum += static_cast<double>(rep.winding[j]) * div.points[j].multiplicity;
    const double scale = std::max(1.0, rep.fs_length);
    rep.is_exact = std::abs(rep.action) < action_tol * scale;
    rep.is_d_monotonic = std::abs(rep.enclosed_area - wsum) < area_tol * scale;
    return rep;
}

} // namespace sbs
