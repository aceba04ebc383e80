#include "sbs/morse.hpp"

#include <algorithm>
#include <cmath>

#include "sbs/numerics.hpp"

namespace sbs {

namespace {

// machine-floor pole guard: the flow legitimately works down to psi ~ psi_cap
void require_not_on_divisor(const BinaryForm& form, const SpherePoint& p) {
    if (section_norm(form, p) < 1e-300 * form.coeff_scale())
        throw_divisor_pole("gradient_field: point lies on the zero divisor");
}

Complex gradient_coefficient(const BinaryForm& form, const SpherePoint& p) {
    const auto jet = detail::potential_jet(form, p);
    const double dens = fs_metric_density(p, static_cast<double>(form.degree));
    return 2.0 * std::conj(jet.psi_z) / dens;
}

double metric_gradient_norm(const BinaryForm& form, const SpherePoint& p) {
    const auto jet = detail::potential_jet(form, p);
    const double dens = fs_metric_density(p, static_cast<double>(form.degree));
    return 2.0 * std::abs(jet.psi_z) / std::sqrt(dens);
}

} // namespace

TangentVector gradient_field(const BinaryForm& form, const SpherePoint& p) {
    require_not_on_divisor(form, p);
    return TangentVector{p, gradient_coefficient(form, p)};
}

namespace {

struct Classified {
    std::array<double, 2> eigenvalues; // ascending, metric normalized
    int index;
    Complex descending_direction; // unit chart direction, valid when index == 1
};

Classified classify(const BinaryForm& form, const SpherePoint& p) {
    const auto jet = detail::potential_jet(form, p);
    const double dens = fs_metric_density(p, static_cast<double>(form.degree));
    const double lo = 2.0 * (jet.psi_zzbar - std::abs(jet.psi_zz)) / dens;
    const double hi = 2.0 * (jet.psi_zzbar + std::abs(jet.psi_zz)) / dens;
    Classified out;
    out.eigenvalues = {lo, hi};
    out.index = (lo < 0.0 ? 1 : 0) + (hi < 0.0 ? 1 : 0);
    const double theta = 0.5 * (M_PI - std::arg(jet.psi_zz));
    out.descending_direction = Complex{std::cos(theta), std::sin(theta)};
    return out;
}

// Newton step for psi_z = 0: solve psi_zz * delta + psi_zzbar * conj(delta) = -psi_z.
// Falls back to a clamped gradient step when the Hessian is near singular.
std::optional<SpherePoint> newton_critical(const BinaryForm& form, SpherePoint seed, double tol) {
    SpherePoint x = seed;
    for (int it = 0; it < 80; ++it) {
        if (section_norm(form, x) < 1e-13 * form.coeff_scale()) return std::nullopt;
        const auto jet = detail::potential_jet(form, x);
        const double gnorm = metric_gradient_norm(form, x);
        if (gnorm < tol) return x;
        const Complex A = jet.psi_zz;
        const double B = jet.psi_zzbar;
        const Complex R = -jet.psi_z;
        const double den = std::norm(A) - B * B;
        Complex step;
        if (std::abs(den) > 1e-10 * (std::norm(A) + B * B)) {
            step = (std::conj(A) * R - B * std::conj(R)) / den;
        } else {
            step = R / (2.0 * B); // degenerate direction: descend on the definite part
        }
        const double cap = 0.25;
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        x = SpherePoint{x.chart, x.coord + step}.normalized();
        if (std::abs(x.coord) > 3.0) return std::nullopt;
    }
    return metric_gradient_norm(form, x) < tol ? std::optional<SpherePoint>(x) : std::nullopt;
}

std::vector<CriticalPoint> search_critical(const BinaryForm& form, const CriticalFinderOptions& opts,
                                           int density) {
    std::vector<SpherePoint> seeds;
    for (int chart_i = 0; chart_i < 2; ++chart_i) {
        const Chart chart = chart_i == 0 ? Chart::Affine0 : Chart::Affine1;
        for (int i = 0; i < density; ++i) {
            for (int j = 0; j < density; ++j) {
                const double x = -1.05 + 2.1 * (i + 0.5) / density;
                const double y = -1.05 + 2.1 * (j + 0.5) / density;
                if (x * x + y * y > 1.1025) continue; // other chart covers it
                seeds.push_back(SpherePoint{chart, Complex{x, y}});
            }
        }
    }

    std::vector<std::optional<SpherePoint>> hits(seeds.size());
    num::parallel_for(seeds.size(), [&](std::size_t i) {
        hits[i] = newton_critical(form, seeds[i], opts.newton_tol);
    });

    std::vector<SpherePoint> found;
    for (const auto& h : hits) {
        if (!h) continue;
        bool dup = false;
        for (const auto& f : found)
            if (chordal_distance(f, *h) < opts.dedupe_radius) {
                dup = true;
                break;
            }
        if (!dup) found.push_back(*h);
    }

    std::vector<CriticalPoint> out;
    for (const auto& p : found) {
        const auto cls = classify(form, p);
        if (std::min(std::abs(cls.eigenvalues[0]), std::abs(cls.eigenvalues[1])) < opts.degenerate_tol)
            throw_degenerate_critical("find_critical_points: non-Morse critical structure detected");
        CriticalPoint cp;
        cp.location = p;
        cp.index = cls.index;
        cp.value = kahler_potential(form, p);
        cp.hessian_eigenvalues = cls.eigenvalues;
        if (cls.index == 1) cp.unstable_direction = TangentVector{p, cls.descending_direction};
        out.push_back(cp);
    }
    std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.location.chart != b.location.chart) return a.location.chart < b.location.chart;
        if (a.location.coord.real() != b.location.coord.real())
            return a.location.coord.real() < b.location.coord.real();
        return a.location.coord.imag() < b.location.coord.imag();
    });
    return out;
}

} // namespace

std::vector<CriticalPoint> find_critical_points(const BinaryForm& form,
                                                const CriticalFinderOptions& opts) {
    if (discriminant_distance(form) <= opts.near_discriminant)
        throw_near_discriminant("find_critical_points: form has (nearly) multiple zeros");

    // Morse count check: indices must balance the Euler characteristic of the
    // divisor complement; densify the seed grid until they do.
    const int chi = 2 - static_cast<int>(divisor_roots(form).points.size());
    int density = opts.grid_density;
    std::vector<CriticalPoint> out;
    for (int attempt = 0; attempt < 3; ++attempt, density *= 2) {
        out = search_critical(form, opts, density);
        int sum = 0;
        for (const auto& cp : out) sum += cp.index == 0 ? 1 : -1;
        if (sum == chi) return out;
    }
    return out; // grid-limited answer (not reached for the supported degrees)
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

} // namespace

Trajectory integrate_flow(const BinaryForm& form, const SpherePoint& start, FlowDirection direction,
                          const FlowControls& controls) {
    require_not_on_divisor(form, start);
    const double sign = direction == FlowDirection::Up ? 1.0 : -1.0;
    const std::vector<CriticalPoint>& cps =
        controls.critical_points.empty() ? find_critical_points(form) : controls.critical_points;

    const auto velocity = [&](const SpherePoint& p) { return sign * gradient_coefficient(form, p); };
    const auto nearest_critical = [&](const SpherePoint& p) -> const CriticalPoint* {
        const CriticalPoint* best = nullptr;
        double best_d = controls.critical_capture;
        for (const auto& cp : cps) {
            const double d = chordal_distance(cp.location, p);
            if (d < best_d) {
                best_d = d;
                best = &cp;
            }
        }
        return best;
    };

    const Divisor divisor = divisor_roots(form);
    const auto near_divisor = [&](const SpherePoint& p) {
        for (const auto& e : divisor.points)
            if (chordal_distance(p, e.point) < controls.divisor_capture) return true;
        return false;
    };

    Trajectory traj;
    SpherePoint x = start.normalized();
    double t = 0.0;
    traj.samples.push_back({t, x, kahler_potential(form, x)});

    // immediate capture: launching exactly at a critical point is a fixed point
    if (metric_gradient_norm(form, x) < controls.grad_stop) {
        if (const CriticalPoint* cp = nearest_critical(x)) {
            traj.terminus = {Terminus::Kind::Critical, *cp};
            return traj;
        }
    }

    Complex k1 = velocity(x);
    double h = std::min(0.01, controls.max_chord / std::max(1e-12, std::abs(k1)));
    for (long step = 0; step < controls.max_steps; ++step) {
        // keep sample chords below the resolution guard
        const double vmag = std::abs(k1);
        if (vmag * h > controls.max_chord) h = controls.max_chord / vmag;

        const Complex z = x.coord;
        const auto at = [&](Complex dz) { return SpherePoint{x.chart, z + dz}; };
        const Complex k2 = velocity(at(h * (A21 * k1)));
        const Complex k3 = velocity(at(h * (A31 * k1 + A32 * k2)));
        const Complex k4 = velocity(at(h * (A41 * k1 + A42 * k2 + A43 * k3)));
        const Complex k5 = velocity(at(h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4)));
        const Complex k6 = velocity(at(h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5)));
        const Complex dz = h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        const Complex k7 = velocity(at(dz));
        const Complex err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

        const double tol = controls.abs_tol + controls.rel_tol * std::max(std::abs(z), std::abs(z + dz));
        const double ratio = std::abs(err) / tol;
        if (ratio > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(ratio, -0.25));
            continue;
        }

        t += h;
        x = SpherePoint{x.chart, z + dz}.normalized();
        traj.samples.push_back({t, x, kahler_potential(form, x)});
        k1 = velocity(x); // chart may have changed; recompute rather than reuse FSAL
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(ratio, 1e-10), -0.2)));

        if (traj.samples.back().psi > controls.psi_cap || near_divisor(x)) {
            traj.terminus = {Terminus::Kind::Divisor, std::nullopt};
            return traj;
        }
        if (metric_gradient_norm(form, x) < controls.grad_stop) {
            if (const CriticalPoint* cp = nearest_critical(x)) {
                traj.terminus = {Terminus::Kind::Critical, *cp};
                return traj;
            }
        }
    }
    traj.terminus = {Terminus::Kind::Unresolved, std::nullopt};
    return traj;
}

double max_sbs_residual(const BinaryForm& form, const std::vector<TrajectorySample>& samples) {
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
        const SpherePoint& p = samples[k].point;
        const Complex fwd = samples[k + 1].point.coord_in(p.chart);
        const Complex bwd = samples[k - 1].point.coord_in(p.chart);
        const Complex secant = fwd - bwd;
        const double len = std::abs(secant);
        if (len == 0.0) continue;
        const Complex rho = rho_coefficient(form, p);
        worst = std::max(worst, std::abs((rho * (secant / len)).imag()));
    }
    return worst;
}

Skeleton extract_skeleton(const BinaryForm& form, const SkeletonOptions& opts) {
    Skeleton skel;
    skel.critical_points = find_critical_points(form, opts.finder);

    FlowControls flow = opts.flow;
    flow.critical_points = skel.critical_points;

    std::vector<const CriticalPoint*> saddles;
    for (const auto& cp : skel.critical_points)
        if (cp.index == 1) saddles.push_back(&cp);

    std::vector<std::array<Trajectory, 2>> halves(saddles.size());
    num::parallel_for(saddles.size(), [&](std::size_t i) {
        const CriticalPoint& s = *saddles[i];
        const Complex dir = s.unstable_direction->value;
        for (int side = 0; side < 2; ++side) {
            const Complex offset = (side == 0 ? 1.0 : -1.0) * opts.launch_offset * dir;
            const SpherePoint launch{s.location.chart, s.location.coord + offset};
            halves[i][static_cast<std::size_t>(side)] =
                integrate_flow(form, launch, FlowDirection::Down, flow);
        }
    });

    for (std::size_t i = 0; i < saddles.size(); ++i) {
        const CriticalPoint& s = *saddles[i];
        for (const auto& half : halves[i])
            if (half.terminus.kind == Terminus::Kind::Unresolved)
                throw_skeleton_incomplete("extract_skeleton: separatrix did not resolve");
        // a separatrix may legitimately escape to the divisor only if the
        // saddle is not part of a finite arc; the base set then omits it
        if (halves[i][0].terminus.kind != Terminus::Kind::Critical ||
            halves[i][1].terminus.kind != Terminus::Kind::Critical)
            continue;

        SkeletonArc arc;
        arc.saddle = s;
        arc.endpoint_a = *halves[i][0].terminus.critical;
        arc.endpoint_b = *halves[i][1].terminus.critical;
        arc.saddle_to_saddle = arc.endpoint_a.index == 1 || arc.endpoint_b.index == 1;

        const auto& down_a = halves[i][0].samples;
        const auto& down_b = halves[i][1].samples;
        arc.samples.reserve(down_a.size() + down_b.size() + 1);
        for (std::size_t k = down_a.size(); k-- > 0;)
            arc.samples.push_back({-down_a[k].time, down_a[k].point, down_a[k].psi});
        arc.samples.push_back({0.0, s.location, s.value});
        for (const auto& smp : down_b) arc.samples.push_back({smp.time, smp.point, smp.psi});

        if (max_sbs_residual(form, arc.samples) > opts.sbs_tol)
            throw_skeleton_incomplete("extract_skeleton: arc violates the Im(rho) criterion");
        skel.arcs.push_back(std::move(arc));
    }
    return skel;
}

} // namespace sbs
