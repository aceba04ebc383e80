#pragma once

#include <complex>
#include <vector>

#include "sbs/sphere.hpp"

namespace sbs {

/// Degree-d homogeneous polynomial P(z0, z1) = sum c_k z0^(d-k) z1^k.
/// In chart Affine0 it evaluates as p(z) = sum c_k z^k, in Affine1 as
/// q(w) = sum c_k w^(d-k); the two satisfy p(z) = z^d q(1/z).
struct BinaryForm {
    int degree = 0;
    std::vector<Complex> coefficients; // c_0 .. c_d

    BinaryForm() = default;
    BinaryForm(int d, std::vector<Complex> coeffs);

    /// Value and first two derivatives of the affine polynomial of `chart`.
    struct Jet {
        Complex f, df, d2f;
    };
    Jet affine_jet(Chart chart, Complex t) const;

    /// max_k |c_k|, the scale used by relative tolerances.
    double coeff_scale() const;

    /// Coefficients scaled to unit max modulus (projective representative).
    BinaryForm normalized() const;
};

/// Zero divisor: points with multiplicities summing to the degree.
struct Divisor {
    struct Entry {
        SpherePoint point;
        int multiplicity = 1;
    };
    std::vector<Entry> points;

    int total_multiplicity() const;
};

/// One sample of a complex-valued 1-form, split into real and imaginary
/// covectors (components against dx, dy of the base point's chart).
struct OneFormSample {
    SpherePoint base;
    std::array<double, 2> real_part{0.0, 0.0};
    std::array<double, 2> imag_part{0.0, 0.0};
};

/// Real covector sample (components against dx, dy of the base chart).
struct CovectorSample {
    SpherePoint base;
    std::array<double, 2> components{0.0, 0.0};

    double operator()(const TangentVector& v) const {
        const TangentVector u = v.in_chart(base.chart);
        return components[0] * u.value.real() + components[1] * u.value.imag();
    }
};

/// Hermitian norm of the section at p: |P(z0,z1)| / (|z0|^2 + |z1|^2)^(d/2).
/// Chart independent; vanishes exactly on the divisor.
double section_norm(const BinaryForm& form, const SpherePoint& p);

/// psi = -ln(section_norm). Throws DivisorPole when |alpha|_h drops below
/// 1e-12 * coeff_scale.
double kahler_potential(const BinaryForm& form, const SpherePoint& p);

/// Chart-coordinate component of rho = d(ln|alpha|^2_h)^(1,0) at p, i.e.
/// rho = rho_coefficient * d(coord). Same pole guard as kahler_potential.
Complex rho_coefficient(const BinaryForm& form, const SpherePoint& p);

/// rho as a pair of real covectors. Its real part is d(ln|alpha|_h) (exact);
/// its imaginary part is minus the Liouville form.
OneFormSample rho_form(const BinaryForm& form, const SpherePoint& p);

/// Liouville form lambda = -Im(rho); satisfies d(lambda) = 2*pi*omega with
/// the area form normalized to total flux d.
CovectorSample liouville_form(const BinaryForm& form, const SpherePoint& p);

/// All d zeros with multiplicity (clustered at chordal 1e-8, Newton
/// polished). Deterministically ordered by (chart, re, im).
Divisor divisor_roots(const BinaryForm& form);

/// Minimum chordal distance between distinct zeros; +infinity for degree 1.
double discriminant_distance(const BinaryForm& form);

namespace detail {

/// Analytic jet of psi at p in the point's own chart: value, psi_z,
/// psi_zz, psi_zzbar. No pole guard; callers decide their envelope.
struct PotentialJet {
    double psi = 0.0;
    Complex psi_z{0.0, 0.0};
    Complex psi_zz{0.0, 0.0};
    double psi_zzbar = 0.0;
};
PotentialJet potential_jet(const BinaryForm& form, const SpherePoint& p);

/// Relative pole-guard threshold on |alpha|_h used by the guarded samplers.
inline constexpr double kPoleGuard = 1e-12;

} // namespace detail

} // namespace sbs
