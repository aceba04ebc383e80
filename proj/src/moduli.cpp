#include "sbs/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sbs/numerics.hpp"

namespace sbs {

namespace {

// projective comparison of coefficient vectors
bool same_form_projectively(const BinaryForm& a, const BinaryForm& b, double tol) {
    if (a.degree != b.degree) return false;
    std::size_t pivot = 0;
    double best = 0.0;
    for (std::size_t k = 0; k < a.coefficients.size(); ++k)
        if (std::abs(a.coefficients[k]) > best) {
            best = std::abs(a.coefficients[k]);
            pivot = k;
        }
    if (best == 0.0) return false;
    if (std::abs(b.coefficients[pivot]) == 0.0) return false;
    const Complex ratio = b.coefficients[pivot] / a.coefficients[pivot];
    double err = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < a.coefficients.size(); ++k) {
        err = std::max(err, std::abs(b.coefficients[k] - ratio * a.coefficients[k]));
        norm = std::max(norm, std::abs(b.coefficients[k]));
    }
    return err <= tol * norm;
}

std::vector<SpherePoint> simple_roots(const BinaryForm& raw_form, int step_index, double margin) {
    // steps are points of the projectivized section space: normalize the scale
    const BinaryForm form = raw_form.normalized();
    const Divisor div = divisor_roots(form);
    for (const auto& e : div.points)
        if (e.multiplicity != 1) {
            std::ostringstream msg;
            msg << "path step " << step_index << " has a multiple zero";
            throw_path_invalid(msg.str());
        }
    if (discriminant_distance(form) <= margin) {
        std::ostringstream msg;
        msg << "path step " << step_index << " violates the discriminant margin";
        throw_path_invalid(msg.str());
    }
    std::vector<SpherePoint> out;
    out.reserve(div.points.size());
    for (const auto& e : div.points) out.push_back(e.point);
    return out;
}

// nearest-neighbor matching with the unambiguity margin; next[i] = index in
// `cur` continuing roots `prev[i]`
std::vector<std::size_t> match_roots(const std::vector<SpherePoint>& prev,
                                     const std::vector<SpherePoint>& cur, int step_index) {
    const std::size_t n = prev.size();
    std::vector<std::size_t> match(n);
    std::vector<bool> taken(n, false);
    double max_matched = 0.0;
    double min_cross = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            const double d = chordal_distance(prev[i], cur[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        match[i] = best;
        max_matched = std::max(max_matched, best_d);
        for (std::size_t j = 0; j < n; ++j)
            if (j != best) min_cross = std::min(min_cross, chordal_distance(prev[i], cur[j]));
        if (taken[best]) {
            std::ostringstream msg;
            msg << "root matching is not a bijection at path step " << step_index;
            throw_continuation_broken(msg.str());
        }
        taken[best] = true;
    }
    if (n > 1 && !(min_cross > 2.0 * max_matched)) {
        std::ostringstream msg;
        msg << "root matching margin too small at path step " << step_index << " (matched "
            << max_matched << ", cross " << min_cross << "); refine the path";
        throw_continuation_broken(msg.str());
    }
    return match;
}

ModuliFiber::Sheet build_sheet(const BinaryForm& form, int zero_index, const SpherePoint& zero,
                               const LoopOptions& opts, std::vector<int>& gaps) {
    ModuliFiber::Sheet sheet;
    sheet.zero_index = zero_index;
    sheet.zero = zero;
    try {
        sheet.loop = construct_exact_loop(form, zero_index, opts);
        sheet.report = check_proposition(form, *sheet.loop, opts.action_tol, opts.action_tol);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoExactRadius) throw;
        gaps.push_back(zero_index);
    }
    return sheet;
}

} // namespace

bool CoefficientPath::is_closed(double tol) const {
    if (steps.size() < 2) return true;
    return same_form_projectively(steps.front(), steps.back(), tol);
}

ModuliFiber enumerate_fiber(const BinaryForm& form, const LoopOptions& opts) {
    if (discriminant_distance(form) <= 1e-6)
        throw_near_discriminant("enumerate_fiber: form has (nearly) multiple zeros");
    const Divisor div = divisor_roots(form);
    ModuliFiber fiber;
    fiber.form = form;
    for (std::size_t j = 0; j < div.points.size(); ++j)
        fiber.sheets.push_back(
            build_sheet(form, static_cast<int>(j), div.points[j].point, opts, fiber.gaps));
    return fiber;
}

ModuliFiber continue_fiber(const CoefficientPath& path, const ModuliFiber& start,
                           const ContinuationOptions& opts) {
    if (path.steps.empty()) throw_path_invalid("continue_fiber: empty path");
    if (!same_form_projectively(path.steps.front(), start.form, 1e-10))
        throw_path_invalid("continue_fiber: path does not start at the base form");

    // zero positions tracked per original sheet label
    std::vector<SpherePoint> tracked = simple_roots(path.steps[0], 0, opts.discriminant_margin);
    std::vector<std::size_t> sheet_to_root(start.sheets.size());
    for (std::size_t s = 0; s < start.sheets.size(); ++s) {
        // align the base fiber's sheets with the computed root list
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < tracked.size(); ++j) {
            const double d = chordal_distance(start.sheets[s].zero, tracked[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        sheet_to_root[s] = best;
    }

    for (std::size_t i = 1; i < path.steps.size(); ++i) {
        const std::vector<SpherePoint> cur =
            simple_roots(path.steps[i], static_cast<int>(i), opts.discriminant_margin);
        const auto match = match_roots(tracked, cur, static_cast<int>(i));
        std::vector<SpherePoint> next(tracked.size());
        for (std::size_t j = 0; j < tracked.size(); ++j) next[j] = cur[match[j]];
        tracked = std::move(next);

        if (opts.rebuild_loops_each_step && i + 1 < path.steps.size()) {
            // keep the per-step loops verifiable without failing the tracking
            const Divisor div = divisor_roots(path.steps[i]);
            for (std::size_t s = 0; s < sheet_to_root.size(); ++s) {
                const SpherePoint& z = tracked[sheet_to_root[s]];
                for (std::size_t j = 0; j < div.points.size(); ++j) {
                    if (chordal_distance(div.points[j].point, z) < 1e-9) {
                        std::vector<int> scratch;
                        build_sheet(path.steps[i], static_cast<int>(j), z, opts.loop, scratch);
                        break;
                    }
                }
            }
        }
    }

    // assemble the final fiber with inherited labels
    const BinaryForm& final_form = path.steps.back();
    const Divisor final_div = divisor_roots(final_form);
    ModuliFiber fiber;
    fiber.form = final_form;
    for (std::size_t s = 0; s < start.sheets.size(); ++s) {
        const SpherePoint& z = tracked[sheet_to_root[s]];
        int final_index = -1;
        for (std::size_t j = 0; j < final_div.points.size(); ++j)
            if (chordal_distance(final_div.points[j].point, z) < 1e-7) final_index = static_cast<int>(j);
        if (final_index < 0) throw_continuation_broken("continue_fiber: tracked zero lost at the final step");
        ModuliFiber::Sheet sheet =
            build_sheet(final_form, final_index, final_div.points[static_cast<std::size_t>(final_index)].point,
                        opts.loop, fiber.gaps);
        sheet.zero_index = start.sheets[s].zero_index; // inherited label
        fiber.sheets.push_back(sheet);
    }
    return fiber;
}

MonodromyResult monodromy(const CoefficientPath& path, const ModuliFiber& base,
                          const ContinuationOptions& opts) {
    if (!path.is_closed(1e-10)) throw_path_invalid("monodromy: path is not closed");
    const ModuliFiber end = continue_fiber(path, base, opts);

    MonodromyResult out;
    out.path = path;
    out.permutation.resize(base.sheets.size());
    for (std::size_t s = 0; s < base.sheets.size(); ++s) {
        int target = -1;
        for (std::size_t j = 0; j < base.sheets.size(); ++j)
            if (chordal_distance(end.sheets[s].zero, base.sheets[j].zero) < 1e-6)
                target = static_cast<int>(j);
        if (target < 0) throw_continuation_broken("monodromy: final zeros do not match the base fiber");
        out.permutation[s] = target;
    }
    return out;
}

std::vector<int> root_braid_permutation(const CoefficientPath& path, double discriminant_margin) {
    if (path.steps.empty()) throw_path_invalid("root_braid_permutation: empty path");
    std::vector<SpherePoint> base = simple_roots(path.steps[0], 0, discriminant_margin);
    std::vector<SpherePoint> tracked = base;
    for (std::size_t i = 1; i < path.steps.size(); ++i) {
        const std::vector<SpherePoint> cur =
            simple_roots(path.steps[i], static_cast<int>(i), discriminant_margin);
        const auto match = match_roots(tracked, cur, static_cast<int>(i));
        std::vector<SpherePoint> next(tracked.size());
        for (std::size_t j = 0; j < tracked.size(); ++j) next[j] = cur[match[j]];
        tracked = std::move(next);
    }
    std::vector<int> perm(base.size());
    for (std::size_t j = 0; j < base.size(); ++j) {
        int target = -1;
        for (std::size_t k = 0; k < base.size(); ++k)
            if (chordal_distance(tracked[j], base[k]) < 1e-6) target = static_cast<int>(k);
        if (target < 0) throw_continuation_broken("root_braid_permutation: roots do not close up");
        perm[j] = target;
    }
    return perm;
}

double locate_discriminant(const BinaryForm& form, const BinaryForm& direction, double t_max) {
    if (direction.degree != form.degree)
        throw_invalid_input("locate_discriminant: direction degree mismatch");
    const auto family = [&](double t) {
        std::vector<Complex> c(form.coefficients.size());
        for (std::size_t k = 0; k < c.size(); ++k)
            c[k] = form.coefficients[k] + t * direction.coefficients[k];
        return BinaryForm(form.degree, c);
    };
    const auto dist = [&](double t) { return discriminant_distance(family(t)); };
    constexpr double kTarget = 1e-6;

    // coarse scan for the first dip, then ternary-refine the minimum
    const int scan = 400;
    std::vector<double> ts(scan + 1), ds(scan + 1);
    for (int i = 0; i <= scan; ++i) {
        ts[static_cast<std::size_t>(i)] = t_max * i / scan;
        ds[static_cast<std::size_t>(i)] = dist(ts[static_cast<std::size_t>(i)]);
    }
    // bisect the left edge of {dist < target} inside [a, b] (b below target
    // or b at the crossing) down to bracket width < 1e-8
    const auto left_edge = [&](double a, double b) {
        if (dist(a) < kTarget) return a;
        while (b - a > 1e-9) {
            const double m = 0.5 * (a + b);
            (dist(m) < kTarget ? b : a) = m;
        }
        return 0.5 * (a + b);
    };

    for (int i = 1; i <= scan; ++i) {
        // a grid point already below the target: the crossing sits in this cell
        if (ds[static_cast<std::size_t>(i)] < kTarget)
            return left_edge(ts[static_cast<std::size_t>(i - 1)], ts[static_cast<std::size_t>(i)]);

        const bool local_min = i < scan && ds[static_cast<std::size_t>(i)] < ds[static_cast<std::size_t>(i - 1)] &&
                               ds[static_cast<std::size_t>(i)] <= ds[static_cast<std::size_t>(i + 1)];
        const bool end_min = i == scan && ds[static_cast<std::size_t>(i)] < ds[static_cast<std::size_t>(i - 1)];
        if (!local_min && !end_min) continue;

        double lo = ts[static_cast<std::size_t>(i - 1)];
        double hi = ts[static_cast<std::size_t>(std::min(i + 1, scan))];
        for (int it = 0; it < 300 && hi - lo > 1e-12; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (dist(m1) < dist(m2))
                hi = m2;
            else
                lo = m1;
        }
        const double t_min = 0.5 * (lo + hi);
        const double d_min = dist(t_min);
        if (d_min < kTarget) return left_edge(0.0, t_min);
        // near a multiplicity >= 3 collision the separation scales like
        // |t - t*|^(1/m), so the sub-target window is narrower than double
        // precision resolves; the located minimizer is the crossing
        if (d_min < 1e-3) return t_min;
        throw_no_sign_change("locate_discriminant: family minimum stays above the target distance");
    }
    throw_no_sign_change("locate_discriminant: no approach to the discriminant in the bracket");
}

} // namespace sbs
