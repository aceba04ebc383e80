#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

using namespace sbs;

namespace {

// independent evaluation straight from homogeneous coordinates
double section_norm_oracle(const BinaryForm& form, Complex z0, Complex z1) {
    Complex acc{0.0, 0.0};
    for (int k = 0; k <= form.degree; ++k) {
        Complex term = form.coefficients[static_cast<std::size_t>(k)];
        for (int i = 0; i < form.degree - k; ++i) term *= z0;
        for (int i = 0; i < k; ++i) term *= z1;
        acc += term;
    }
    return std::abs(acc) / std::pow(std::norm(z0) + std::norm(z1), 0.5 * form.degree);
}

} // namespace

TEST_CASE("section norm: monomial, zeros at roots of unity, hand value") {
    CHECK(section_norm(test::monomial(3), SpherePoint::zero()) == doctest::Approx(1.0));
    CHECK(section_norm(test::p3(), SpherePoint::affine({1.0, 0.0})) == doctest::Approx(0.0));
    // |1-(-1)^3| / 2^(3/2) = 2^(-1/2)
    const double v = section_norm(test::p3(), SpherePoint::affine({-1.0, 0.0}));
    CHECK(v == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-14));
    CHECK(v == doctest::Approx(section_norm_oracle(test::p3(), {1.0, 0.0}, {-1.0, 0.0})).epsilon(1e-13));
}

TEST_CASE("section norm is scale invariant in homogeneous coordinates") {
    auto& gen = test::rng();
    for (int i = 0; i < 50; ++i) {
        const BinaryForm form = test::random_form(gen, 4);
        const SpherePoint p = test::random_point(gen);
        const auto h = p.homogeneous();
        const Complex lambda{1.7, -0.4};
        CHECK(section_norm(form, p) ==
              doctest::Approx(section_norm_oracle(form, lambda * h[0], lambda * h[1])).epsilon(1e-11));
    }
}

TEST_CASE("potential: monomial zero, hand value, local minimum at the origin") {
    CHECK(kahler_potential(test::monomial(4), SpherePoint::zero()) == doctest::Approx(0.0));
    CHECK(kahler_potential(test::p3(), SpherePoint::affine({-1.0, 0.0})) ==
          doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
    const double at0 = kahler_potential(test::p3(), SpherePoint::zero());
    CHECK(at0 == doctest::Approx(0.0));
    for (int k = 0; k < 16; ++k) {
        const double t = 2.0 * M_PI * k / 16;
        const SpherePoint nb{Chart::Affine0, 0.05 * Complex{std::cos(t), std::sin(t)}};
        CHECK(kahler_potential(test::p3(), nb) > at0);
    }
}

TEST_CASE("potential is chart consistent on the overlap") {
    auto& gen = test::rng();
    std::uniform_real_distribution<double> u(0.9, 1.1);
    for (int i = 0; i < 200; ++i) {
        const BinaryForm form = test::random_form(gen, 3);
        const double r = u(gen);
        const double t = 2.0 * M_PI * i / 200.0;
        const SpherePoint p{Chart::Affine0, r * Complex{std::cos(t), std::sin(t)}};
        const SpherePoint q = p.flipped();
        if (section_norm(form, p) < 1e-6 * form.coeff_scale()) continue;
        CHECK(kahler_potential(form, p) ==
              doctest::Approx(kahler_potential(form, q)).epsilon(1e-12));
        CHECK(section_norm(form, p) == doctest::Approx(section_norm(form, q)).epsilon(1e-12));
    }
}

TEST_CASE("potential pole guard fires on the divisor") {
    CHECK_THROWS_AS(kahler_potential(test::p3(), SpherePoint::affine({1.0, 0.0})), Error);
    try {
        kahler_potential(test::p3(), SpherePoint::affine({1.0 + 1e-14, 0.0}));
        FAIL("expected DivisorPole");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DivisorPole);
    }
}

TEST_CASE("rho real part is the differential of ln|alpha| (finite differences)") {
    auto& gen = test::rng();
    double worst = 0.0;
    int tested = 0;
    while (tested < 100) {
        const BinaryForm form = test::random_form(gen, 3);
        const SpherePoint p = test::random_point(gen);
        if (section_norm(form, p) < 0.05 * form.coeff_scale()) continue;
        ++tested;
        const auto fd = test::fd_differential(
            [&](const SpherePoint& q) { return std::log(section_norm(form, q)); }, p);
        const OneFormSample s = rho_form(form, p);
        worst = std::max({worst, std::abs(s.real_part[0] - fd[0]), std::abs(s.real_part[1] - fd[1])});
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("closed loop integrals of Re rho vanish (exactness)") {
    auto& gen = test::rng();
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int i = 0; i < 10; ++i) {
        const BinaryForm form = test::random_form(gen, 3);
        const Complex c{u(gen), u(gen)};
        const double r = 0.2 + 0.3 * std::abs(u(gen));
        bool hits_divisor = false;
        const Divisor div = divisor_roots(form);
        for (const auto& e : div.points)
            if (std::abs(e.point.coord_in(Chart::Affine0) - c) < r + 0.05 &&
                std::abs(e.point.coord_in(Chart::Affine0) - c) > r - 0.05)
                hits_divisor = true;
        if (hits_divisor) continue;
        const double integral = test::contour_integral_oracle(
            [&](const SpherePoint& p) {
                const OneFormSample s = rho_form(form, p);
                return CovectorSample{p, {s.real_part[0], s.real_part[1]}};
            },
            [&](double t) { return c + r * Complex{std::cos(t), std::sin(t)}; });
        CHECK(std::abs(integral) < 1e-8);
    }
}

TEST_CASE("residue law: Im rho integrates to 2 pi around a simple zero") {
    const BinaryForm form = test::p3();
    const auto im_rho_integral = [&](double r) {
        return test::contour_integral_oracle(
            [&](const SpherePoint& p) {
                const OneFormSample s = rho_form(form, p);
                return CovectorSample{p, {s.imag_part[0], s.imag_part[1]}};
            },
            [&](double t) { return Complex{1.0, 0.0} + r * Complex{std::cos(t), std::sin(t)}; });
    };
    const double i2 = im_rho_integral(1e-2);
    const double i3 = im_rho_integral(1e-3);
    // area term scales as r^2: Richardson with radii 1e-2, 1e-3
    const double extrapolated = (100.0 * i3 - i2) / 99.0;
    CHECK(std::abs(extrapolated - 2.0 * M_PI) < 1e-4);
    CHECK(std::abs(i3 - 2.0 * M_PI) < 1e-4); // raw value at the smaller radius is already close
}

TEST_CASE("Im rho vanishes along the symmetry ray of P3") {
    const BinaryForm form = test::p3();
    for (double x : {-0.2, -0.5, -0.9, -1.05}) {
        const SpherePoint p = SpherePoint::affine({x, 0.0});
        const Complex rho = rho_coefficient(form, p);
        const Complex dir{-1.0, 0.0}; // ray direction
        CHECK(std::abs((rho * dir).imag()) < 1e-10);
    }
}

TEST_CASE("Liouville form satisfies d(lambda) = 2 pi omega on small discs") {
    auto& gen = test::rng();
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 8; ++i) {
        const BinaryForm form = test::random_form(gen, 3);
        const Complex c{u(gen), u(gen)};
        const double r = 0.15;
        const Divisor div = divisor_roots(form);
        bool clear = true;
        for (const auto& e : div.points)
            if (std::abs(e.point.coord_in(Chart::Affine0) - c) < r + 0.05) clear = false;
        if (!clear) continue;
        const double circulation = test::contour_integral_oracle(
            [&](const SpherePoint& p) { return liouville_form(form, p); },
            [&](double t) { return c + r * Complex{std::cos(t), std::sin(t)}; });
        const double area = test::disc_area_oracle(c, r, static_cast<double>(form.degree));
        CHECK(std::abs(circulation - 2.0 * M_PI * area) < 1e-6);
    }
}

TEST_CASE("Liouville circulation shrinks with the loop away from zeros") {
    const BinaryForm form = test::p3();
    const auto circ = [&](double r) {
        return test::contour_integral_oracle(
            [&](const SpherePoint& p) { return liouville_form(form, p); },
            [&](double t) { return Complex{0.2, 0.1} + r * Complex{std::cos(t), std::sin(t)}; });
    };
    CHECK(std::abs(circ(0.05)) < 2.0 * M_PI * test::disc_area_oracle({0.2, 0.1}, 0.05, 3.0) + 1e-8);
    CHECK(std::abs(circ(0.01)) < 2e-3); // ~ 2 pi * area = O(r^2)
    CHECK(std::abs(circ(0.01)) < std::abs(circ(0.05)) / 20.0);
}

TEST_CASE("divisor roots: cube roots of unity, monomial at infinity, perfect square") {
    const Divisor d3 = divisor_roots(test::p3());
    REQUIRE(d3.points.size() == 3);
    std::vector<Complex> expect = {Complex{-0.5, -std::sqrt(3.0) / 2}, Complex{-0.5, std::sqrt(3.0) / 2},
                                   Complex{1.0, 0.0}};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(d3.points[i].multiplicity == 1);
        CHECK(std::abs(d3.points[i].point.coord_in(Chart::Affine0) - expect[i]) < 1e-12);
    }

    const Divisor dm = divisor_roots(test::monomial(4));
    REQUIRE(dm.points.size() == 1);
    CHECK(dm.points[0].multiplicity == 4);
    CHECK(chordal_distance(dm.points[0].point, SpherePoint::infinity()) < 1e-14);

    const Divisor dsq = divisor_roots(test::perfect_square());
    REQUIRE(dsq.points.size() == 1);
    CHECK(dsq.points[0].multiplicity == 2);
    CHECK(std::abs(dsq.points[0].point.coord_in(Chart::Affine0) - Complex{1.0, 0.0}) < 1e-10);
}

TEST_CASE("divisor roots polish to tiny residuals on random forms") {
    auto& gen = test::rng();
    for (int i = 0; i < 40; ++i) {
        const BinaryForm form = test::random_form(gen, 5);
        const Divisor div = divisor_roots(form);
        CHECK(div.total_multiplicity() == 5);
        for (const auto& e : div.points) {
            const auto jet = form.affine_jet(e.point.chart, e.point.coord);
            CHECK(std::abs(jet.f) < 1e-10 * form.coeff_scale());
        }
    }
}

TEST_CASE("discriminant distance: P3 value, degenerate cases") {
    // adjacent cube roots of unity: |1 - e^{2 pi i/3}| = sqrt(3), chordal /2
    CHECK(discriminant_distance(test::p3()) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
    CHECK(discriminant_distance(test::perfect_square()) == doctest::Approx(0.0));
    CHECK(discriminant_distance(test::z0z1()) == doctest::Approx(1.0)); // antipodal zeros
    // oracle: direct pairwise min over the computed roots
    const Divisor div = divisor_roots(test::p3());
    double best = 1e300;
    for (std::size_t i = 0; i < div.points.size(); ++i)
        for (std::size_t j = i + 1; j < div.points.size(); ++j)
            best = std::min(best, test::chordal_oracle(div.points[i].point, div.points[j].point));
    CHECK(discriminant_distance(test::p3()) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("binary form JSON aliases p(z) = z^d q(1/z)") {
    auto& gen = test::rng();
    for (int i = 0; i < 100; ++i) {
        const BinaryForm form = test::random_form(gen, 4);
        const Complex z = test::random_unit_disk(gen) + Complex{1.2, 0.0};
        const auto pz = form.affine_jet(Chart::Affine0, z).f;
        const auto qw = form.affine_jet(Chart::Affine1, 1.0 / z).f;
        CHECK(std::abs(pz - std::pow(z, form.degree) * qw) < 1e-10 * std::abs(pz));
    }
}
