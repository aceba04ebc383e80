#include "sbs/section.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "sbs/numerics.hpp"

namespace sbs {

BinaryForm::BinaryForm(int d, std::vector<Complex> coeffs) : degree(d), coefficients(std::move(coeffs)) {
    if (degree < 1) throw_invalid_input("BinaryForm: degree must be >= 1");
    if (coefficients.size() != static_cast<std::size_t>(degree) + 1)
        throw_invalid_input("BinaryForm: need degree + 1 coefficients");
    if (coeff_scale() == 0.0) throw_invalid_input("BinaryForm: all coefficients vanish");
}

BinaryForm::Jet BinaryForm::affine_jet(Chart chart, Complex t) const {
    // Horner with three accumulators; Affine1 runs the coefficients reversed.
    Complex f{0.0, 0.0}, df{0.0, 0.0}, d2f{0.0, 0.0};
    const int n = degree;
    for (int i = n; i >= 0; --i) {
        const std::size_t k = (chart == Chart::Affine0) ? static_cast<std::size_t>(i)
                                                        : static_cast<std::size_t>(n - i);
        d2f = d2f * t + 2.0 * df;
        df = df * t + f;
        f = f * t + coefficients[k];
    }
    return {f, df, d2f};
}

double BinaryForm::coeff_scale() const {
    double m = 0.0;
    for (const auto& c : coefficients) m = std::max(m, std::abs(c));
    return m;
}

BinaryForm BinaryForm::normalized() const {
    const double s = coeff_scale();
    BinaryForm out = *this;
    for (auto& c : out.coefficients) c /= s;
    return out;
}

int Divisor::total_multiplicity() const {
    int s = 0;
    for (const auto& e : points) s += e.multiplicity;
    return s;
}

double section_norm(const BinaryForm& form, const SpherePoint& p) {
    const auto jet = form.affine_jet(p.chart, p.coord);
    return std::abs(jet.f) * std::pow(1.0 + std::norm(p.coord), -0.5 * form.degree);
}

namespace detail {

PotentialJet potential_jet(const BinaryForm& form, const SpherePoint& p) {
    const auto jet = form.affine_jet(p.chart, p.coord);
    const Complex t = p.coord;
    const double r2 = std::norm(t);
    const double den = 1.0 + r2;
    const double d = static_cast<double>(form.degree);

    PotentialJet out;
    out.psi = -std::log(std::abs(jet.f)) + 0.5 * d * std::log(den);
    const Complex logd = jet.df / jet.f; // p'/p
    out.psi_z = -0.5 * logd + 0.5 * d * std::conj(t) / den;
    const Complex logdd = (jet.df * jet.df - jet.d2f * jet.f) / (jet.f * jet.f); // (p'^2 - p''p)/p^2
    out.psi_zz = 0.5 * logdd - 0.5 * d * std::conj(t) * std::conj(t) / (den * den);
    out.psi_zzbar = 0.5 * d / (den * den);
    return out;
}

} // namespace detail

namespace {

void require_off_divisor(const BinaryForm& form, const SpherePoint& p, const char* op) {
    if (section_norm(form, p) < detail::kPoleGuard * form.coeff_scale())
        throw_divisor_pole(std::string(op) + ": evaluation too close to the zero divisor");
}

} // namespace

double kahler_potential(const BinaryForm& form, const SpherePoint& p) {
    require_off_divisor(form, p, "kahler_potential");
    return detail::potential_jet(form, p).psi;
}

Complex rho_coefficient(const BinaryForm& form, const SpherePoint& p) {
    require_off_divisor(form, p, "rho_form");
    // rho = d ln|alpha|^2 (1,0)-part = -2 psi_z dz
    return -2.0 * detail::potential_jet(form, p).psi_z;
}

OneFormSample rho_form(const BinaryForm& form, const SpherePoint& p) {
    const Complex rho = rho_coefficient(form, p);
    OneFormSample s;
    s.base = p;
    s.real_part = {rho.real(), -rho.imag()};
    s.imag_part = {rho.imag(), rho.real()};
    return s;
}

CovectorSample liouville_form(const BinaryForm& form, const SpherePoint& p) {
    const Complex rho = rho_coefficient(form, p);
    // lambda = -Im(rho)
    return CovectorSample{p, {-rho.imag(), -rho.real()}};
}

namespace {

SpherePoint polished_root(const BinaryForm& form, SpherePoint seed) {
    SpherePoint x = seed.normalized();
    const double scale = form.coeff_scale();
    for (int it = 0; it < 100; ++it) {
        const auto jet = form.affine_jet(x.chart, x.coord);
        if (std::abs(jet.f) < 1e-14 * scale) return x;
        if (std::abs(jet.df) == 0.0) break; // multiple root: cluster handles it
        const Complex step = jet.f / jet.df;
        x = SpherePoint{x.chart, x.coord - step}.normalized();
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(x.coord))) return x;
    }
    // Newton stagnates in an eps^(1/m) disk around an m-fold root; accept if
    // the residual already sits at the multiple-root floor.
    const auto jet = form.affine_jet(x.chart, x.coord);
    if (std::abs(jet.f) < 1e-8 * scale) return x;
    throw_ill_conditioned("divisor_roots: Newton polishing failed to converge");
}

// coefficients of the affine polynomial of `chart`
std::vector<Complex> chart_coeffs(const BinaryForm& form, Chart chart) {
    std::vector<Complex> a(form.coefficients.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        a[k] = (chart == Chart::Affine0) ? form.coefficients[k]
                                         : form.coefficients[a.size() - 1 - k];
    return a;
}

std::vector<Complex> poly_derivative(const std::vector<Complex>& a) {
    if (a.size() <= 1) return {Complex{0.0, 0.0}};
    std::vector<Complex> b(a.size() - 1);
    for (std::size_t k = 1; k < a.size(); ++k) b[k - 1] = a[k] * static_cast<double>(k);
    return b;
}

Complex poly_eval(const std::vector<Complex>& a, Complex t) {
    Complex f{0.0, 0.0};
    for (std::size_t i = a.size(); i-- > 0;) f = f * t + a[i];
    return f;
}

// Certify that a coarse cluster of m polished roots is an exact m-fold zero:
// polish the simple root of the (m-1)-th derivative near the centroid and
// require the lower derivatives to vanish there at working precision.
std::optional<SpherePoint> certify_multiple(const BinaryForm& form, Chart chart, Complex centroid,
                                            int m) {
    std::vector<std::vector<Complex>> derivs;
    derivs.push_back(chart_coeffs(form, chart));
    for (int j = 1; j < m; ++j) derivs.push_back(poly_derivative(derivs.back()));

    const auto& target = derivs[static_cast<std::size_t>(m - 1)];
    const auto dtarget = poly_derivative(target);
    Complex u = centroid;
    for (int it = 0; it < 60; ++it) {
        const Complex f = poly_eval(target, u);
        const Complex df = poly_eval(dtarget, u);
        if (std::abs(df) == 0.0) return std::nullopt;
        const Complex step = f / df;
        u -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(u))) break;
    }
    if (std::abs(u - centroid) > 1e-5 * (1.0 + std::abs(centroid))) return std::nullopt;

    const double scale = form.coeff_scale();
    double fall = 1.0;
    for (int j = 0; j < m; ++j) {
        if (std::abs(poly_eval(derivs[static_cast<std::size_t>(j)], u)) > 1e-11 * scale * fall)
            return std::nullopt;
        fall *= static_cast<double>(form.degree - j);
    }
    return SpherePoint{chart, u}.normalized();
}

} // namespace

Divisor divisor_roots(const BinaryForm& form) {
    const double scale = form.coeff_scale();
    if (scale == 0.0) throw_invalid_input("divisor_roots: zero form");

    // effective affine degree: trailing coefficients below working precision
    // correspond to zeros at [0:1]
    int eff = form.degree;
    while (eff > 0 && std::abs(form.coefficients[static_cast<std::size_t>(eff)]) < 1e-14 * scale) --eff;

    std::vector<SpherePoint> raw;
    if (eff > 0) {
        std::vector<Complex> affine(form.coefficients.begin(), form.coefficients.begin() + eff + 1);
        for (const Complex r : num::aberth_roots(affine))
            raw.push_back(polished_root(form, SpherePoint{Chart::Affine0, r}));
    }

    // Newton stagnates in an eps^(1/m) disk around an m-fold root, so the
    // grouping radius must cascade: merge candidates at each level, keep a
    // merge only when the derivative certificate confirms an exact multiple
    // zero, otherwise retry the group at the next finer level. The last
    // level (1e-8, no certificate) is the specified clustering radius.
    Divisor out;
    const std::vector<double> levels = {1e-3, 1e-5, 5e-7, 1e-8};

    const std::function<void(const std::vector<std::size_t>&, std::size_t)> resolve =
        [&](const std::vector<std::size_t>& group, std::size_t level) {
            if (group.size() == 1) {
                out.points.push_back({raw[group[0]], 1});
                return;
            }
            if (level + 1 < levels.size()) {
                const Chart chart = raw[group[0]].normalized().chart;
                Complex centroid{0.0, 0.0};
                for (const std::size_t i : group) centroid += raw[i].coord_in(chart);
                centroid /= static_cast<double>(group.size());
                if (auto exact = certify_multiple(form, chart, centroid, static_cast<int>(group.size()))) {
                    out.points.push_back({*exact, static_cast<int>(group.size())});
                    return;
                }
            }
            if (level + 1 == levels.size()) {
                // finest level: emit the cluster as a multiple point
                out.points.push_back({raw[group[0]], static_cast<int>(group.size())});
                return;
            }
            // split at the next finer radius and recurse
            const double radius = levels[level + 1];
            std::vector<bool> used(group.size(), false);
            for (std::size_t a = 0; a < group.size(); ++a) {
                if (used[a]) continue;
                std::vector<std::size_t> sub{group[a]};
                used[a] = true;
                bool grew = true;
                while (grew) {
                    grew = false;
                    for (std::size_t b = 0; b < group.size(); ++b) {
                        if (used[b]) continue;
                        for (const std::size_t s : sub)
                            if (chordal_distance(raw[s], raw[group[b]]) < radius) {
                                sub.push_back(group[b]);
                                used[b] = true;
                                grew = true;
                                break;
                            }
                    }
                }
                resolve(sub, level + 1);
            }
        };

    {
        const std::size_t n = raw.size();
        std::vector<bool> used(n, false);
        for (std::size_t a = 0; a < n; ++a) {
            if (used[a]) continue;
            std::vector<std::size_t> group{a};
            used[a] = true;
            bool grew = true;
            while (grew) {
                grew = false;
                for (std::size_t b = 0; b < n; ++b) {
                    if (used[b]) continue;
                    for (const std::size_t s : group)
                        if (chordal_distance(raw[s], raw[b]) < levels[0]) {
                            group.push_back(b);
                            used[b] = true;
                            grew = true;
                            break;
                        }
                }
            }
            resolve(group, 0);
        }
    }
    if (form.degree > eff) out.points.push_back({SpherePoint::infinity(), form.degree - eff});

    std::sort(out.points.begin(), out.points.end(), [](const Divisor::Entry& a, const Divisor::Entry& b) {
        if (a.point.chart != b.point.chart) return a.point.chart < b.point.chart;
        if (a.point.coord.real() != b.point.coord.real()) return a.point.coord.real() < b.point.coord.real();
        return a.point.coord.imag() < b.point.coord.imag();
    });
    return out;
}

double discriminant_distance(const BinaryForm& form) {
    const Divisor div = divisor_roots(form);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < div.points.size(); ++i) {
        if (div.points[i].multiplicity > 1) return 0.0;
        for (std::size_t j = i + 1; j < div.points.size(); ++j)
            best = std::min(best, chordal_distance(div.points[i].point, div.points[j].point));
    }
    return best;
}

} // namespace sbs
