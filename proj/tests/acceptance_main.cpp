// Acceptance runner: one line per criterion, nonzero exit on any failure.
// Each criterion carries its tolerance and runtime budget in code.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "sbs/cli.hpp"
#include "sbs/moduli.hpp"
#include "sbs/serialize.hpp"
#include "test_support.hpp"

using namespace sbs;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream log;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            log << "    FAILED: " << what << "\n";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const double kRayAngles[3] = {M_PI / 3.0, M_PI, -M_PI / 3.0};

// ---- criterion 1: the five critical points of P3 ----
void criterion_critical_points(Check& c) {
    const auto cps = find_critical_points(test::p3());
    c.require(cps.size() == 5, "expected exactly 5 critical points");
    int minima = 0, saddles = 0;
    for (const auto& cp : cps) {
        if (cp.index == 0) {
            ++minima;
            const double d = std::min(chordal_distance(cp.location, SpherePoint::zero()),
                                      chordal_distance(cp.location, SpherePoint::infinity()));
            c.require(d < 1e-8, "minimum further than 1e-8 from [1:0]/[0:1]");
        } else {
            ++saddles;
            double best = 1e300;
            for (const double t : kRayAngles)
                best = std::min(best, chordal_distance(
                                          cp.location, SpherePoint::affine({std::cos(t), std::sin(t)})));
            c.require(best < 1e-8, "saddle further than 1e-8 from a cube root of -1");
        }
    }
    c.require(minima == 2 && saddles == 3, "expected 2 minima and 3 saddles");
}

// ---- criterion 2: skeleton of three arcs on the symmetry rays ----
void criterion_skeleton(Check& c) {
    const BinaryForm form = test::p3();
    const Skeleton skel = extract_skeleton(form);
    c.require(skel.arcs.size() == 3, "expected exactly 3 arcs");
    for (const auto& arc : skel.arcs) {
        const double ends = chordal_distance(arc.endpoint_a.location, arc.endpoint_b.location);
        c.require(arc.endpoint_a.index == 0 && arc.endpoint_b.index == 0 && ends > 0.9,
                  "arc does not join the two minima");
        c.require(arc.saddle.index == 1, "arc interior point is not a saddle");

        const double ray = std::arg(arc.saddle.location.coord_in(Chart::Affine0));
        double worst_arg = 0.0;
        for (const auto& s : arc.samples) {
            if (std::abs(s.point.coord) < 1e-7) continue;
            const double expected = s.point.chart == Chart::Affine0 ? ray : -ray;
            double dev = std::arg(s.point.coord) - expected;
            while (dev > M_PI) dev -= 2.0 * M_PI;
            while (dev < -M_PI) dev += 2.0 * M_PI;
            worst_arg = std::max(worst_arg, std::abs(dev));
        }
        c.require(worst_arg < 1e-6, "arc leaves its symmetry ray beyond 1e-6");
        c.require(max_sbs_residual(form, arc.samples) < 1e-6,
                  "Im rho along the arc tangent exceeds 1e-6");
    }
}

// ---- criterion 3: the three exact loops of area 1/3 of the total flux ----
void criterion_exact_loops(Check& c) {
    const BinaryForm form = test::p3();
    std::vector<std::vector<int>> windings;
    for (int j = 0; j < 3; ++j) {
        const LoopCurve loop = construct_exact_loop(form, j);
        const double action = action_integral(form, loop);
        c.require(std::abs(action) < 1e-6, "loop action above 1e-6");
        const double area = enclosed_area(form, loop);
        c.require(std::abs(area - 1.0) < 1e-6, "enclosed area misses 1.0 c1 units by over 1e-6");
        c.require(std::abs(area / 3.0 - 1.0 / 3.0) < 3e-7, "unit-total area misses 1/3 by over 3e-7");
        const auto w = winding_numbers(form, loop);
        std::vector<int> basis(3, 0);
        basis[static_cast<std::size_t>(j)] = 1;
        c.require(w == basis, "winding vector is not the standard basis vector");
        windings.push_back(w);
    }
    c.require(windings[0] != windings[1] && windings[1] != windings[2] && windings[0] != windings[2],
              "winding vectors are not pairwise distinct");
}

// ---- criterion 4: exact <=> D-monotonic over 500 random loops ----
void criterion_proposition(Check& c) {
    std::mt19937 gen(7131u);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    int loops_checked = 0, agreements = 0, forms_used = 0;
    while (forms_used < 20) {
        const BinaryForm form = test::random_form(gen, 3);
        ++forms_used;
        int per_form = 0;
        while (per_form < 25) {
            const Complex center{u(gen), u(gen)};
            const double r0 = 0.15 + 0.4 * std::abs(u(gen));
            const LoopCurve loop = test::fourier_loop(gen, center, r0);
            try {
                const LoopReport rep = check_proposition(form, loop, 1e-6, 1e-6);
                ++loops_checked;
                ++per_form;
                if (rep.is_exact == rep.is_d_monotonic) ++agreements;
            } catch (const Error&) {
                continue; // invalid sample (divisor proximity / self-intersection)
            }
        }
    }
    c.require(loops_checked >= 500, "fewer than 500 valid loops");
    c.require(agreements == loops_checked, "exactness and D-monotonicity disagreed");
    c.log << "    " << agreements << "/" << loops_checked << " loops agree on " << forms_used
          << " forms\n";
}

// ---- criterion 5: monodromy transposition against the root braid ----
void criterion_monodromy(Check& c) {
    const BinaryForm direction(3, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
    const double t_star = locate_discriminant(test::p3(), direction, 3.0);
    c.require(std::abs(t_star - std::cbrt(27.0 / 4.0)) < 1e-3,
              "located discriminant parameter far from the analytic value");

    const auto pencil = [](Complex t) {
        return BinaryForm(3, {{1.0, 0.0}, t, {0.0, 0.0}, {-1.0, 0.0}});
    };
    CoefficientPath path;
    const int steps = 64;
    for (int k = 0; k <= steps; ++k) {
        const double s = 2.0 * M_PI * k / steps;
        path.steps.push_back(pencil(t_star + 0.35 * std::exp(Complex{0.0, s})));
    }
    path.steps.back() = path.steps.front();

    const ModuliFiber base = enumerate_fiber(path.steps.front());
    const auto perm = monodromy(path, base).permutation;
    int moved = 0;
    bool involution = true;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (perm[i] != static_cast<int>(i)) ++moved;
        involution = involution && perm[static_cast<std::size_t>(perm[i])] == static_cast<int>(i);
    }
    c.require(moved == 2 && involution, "permutation is not a transposition");
    c.require(perm == root_braid_permutation(path), "sheet permutation disagrees with the root braid");

    CoefficientPath control;
    for (int k = 0; k <= 24; ++k) {
        const double s = 2.0 * M_PI * k / 24;
        control.steps.push_back(pencil(Complex{3.0, 0.0} + 0.2 * std::exp(Complex{0.0, s})));
    }
    control.steps.back() = control.steps.front();
    const auto id = monodromy(control, enumerate_fiber(control.steps.front())).permutation;
    for (std::size_t i = 0; i < id.size(); ++i)
        c.require(id[i] == static_cast<int>(i), "null-homotopic control loop is not the identity");
}

// ---- criterion 6: property suite ----
void criterion_properties(Check& c) {
    std::mt19937 gen(40961u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    // gradient against central differences
    double worst_grad = 0.0;
    int tested = 0;
    while (tested < 100) {
        const BinaryForm form = test::random_form(gen, 3);
        const SpherePoint p = test::random_point(gen);
        if (section_norm(form, p) < 0.05 * form.coeff_scale()) continue;
        ++tested;
        const Complex v{u(gen), u(gen)};
        const auto fd = test::fd_differential(
            [&](const SpherePoint& q) { return kahler_potential(form, q); }, p);
        const double dpsi_v = fd[0] * v.real() + fd[1] * v.imag();
        const double pairing = fs_metric_density(p, static_cast<double>(form.degree)) *
                               (std::conj(gradient_field(form, p).value) * v).real();
        worst_grad = std::max(worst_grad, std::abs(dpsi_v - pairing));
    }
    c.require(worst_grad < 1e-6, "gradient vs finite differences above 1e-6");
    c.log << "    max gradient FD error " << worst_grad << "\n";

    // residue law with Richardson extrapolation, multiplicities 1 and 2
    const auto im_rho_integral = [&](const BinaryForm& form, double r) {
        return test::contour_integral_oracle(
            [&](const SpherePoint& p) {
                const OneFormSample s = rho_form(form, p);
                return CovectorSample{p, {s.imag_part[0], s.imag_part[1]}};
            },
            [&](double t) { return Complex{1.0, 0.0} + r * Complex{std::cos(t), std::sin(t)}; });
    };
    for (int m = 1; m <= 2; ++m) {
        const BinaryForm form = m == 1 ? test::p3() : test::perfect_square();
        const double i2 = im_rho_integral(form, 1e-2);
        const double i3 = im_rho_integral(form, 1e-3);
        const double extrapolated = (100.0 * i3 - i2) / 99.0;
        c.require(std::abs(extrapolated - 2.0 * M_PI * m) < 1e-4,
                  "residue law misses 2 pi m after Richardson extrapolation");
    }

    // exactness of Re rho over random closed loops
    for (int i = 0; i < 10; ++i) {
        const BinaryForm form = test::random_form(gen, 3);
        const Complex center{0.5 * u(gen), 0.5 * u(gen)};
        const double r = 0.2 + 0.2 * std::abs(u(gen));
        const Divisor div = divisor_roots(form);
        bool clear = true;
        for (const auto& e : div.points)
            if (std::abs(std::abs(e.point.coord_in(Chart::Affine0) - center) - r) < 0.05) clear = false;
        if (!clear) continue;
        const double integral = test::contour_integral_oracle(
            [&](const SpherePoint& p) {
                const OneFormSample s = rho_form(form, p);
                return CovectorSample{p, {s.real_part[0], s.real_part[1]}};
            },
            [&](double t) { return center + r * Complex{std::cos(t), std::sin(t)}; });
        c.require(std::abs(integral) < 1e-8, "closed integral of Re rho above 1e-8");
    }

    // d(lambda) = 2 pi omega on random small discs
    for (int i = 0; i < 6; ++i) {
        const BinaryForm form = test::random_form(gen, 3);
        const Complex center{0.5 * u(gen), 0.5 * u(gen)};
        const double r = 0.12;
        const Divisor div = divisor_roots(form);
        bool clear = true;
        for (const auto& e : div.points)
            if (std::abs(e.point.coord_in(Chart::Affine0) - center) < r + 0.05) clear = false;
        if (!clear) continue;
        const double circulation = test::contour_integral_oracle(
            [&](const SpherePoint& p) { return liouville_form(form, p); },
            [&](double t) { return center + r * Complex{std::cos(t), std::sin(t)}; });
        const double area = test::disc_area_oracle(center, r, static_cast<double>(form.degree));
        c.require(std::abs(circulation - 2.0 * M_PI * area) < 1e-6,
                  "Stokes residual for d(lambda) = 2 pi omega above 1e-6");
    }

    // Morse index bound over 100 random forms
    int morse_checked = 0;
    std::uniform_int_distribution<int> deg(3, 6);
    while (morse_checked < 100) {
        const BinaryForm form = test::random_form(gen, deg(gen));
        try {
            for (const auto& cp : find_critical_points(form))
                c.require(cp.index == 0 || cp.index == 1, "Morse index outside {0,1}");
            ++morse_checked;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateCritical) throw;
        }
    }

    // total flux for d = 1..5
    for (int d = 1; d <= 5; ++d)
        c.require(std::abs(test::total_flux_oracle(static_cast<double>(d)) - d) < 1e-6,
                  "total flux misses the degree");
}

// ---- criterion 7: byte-identical CLI reruns ----
void criterion_determinism(Check& c) {
    const fs::path data = fs::path(SBS_TEST_DATA_DIR);
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    const fs::path base =
        fs::temp_directory_path() / ("sbs_acceptance_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(stamp));

    const auto run = [&](const std::string& args) {
        const std::string cmd = std::string(SBS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        c.require(status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0,
                  "CLI run failed: " + args);
    };
    const auto read_all = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    for (int round = 0; round < 2; ++round) {
        const fs::path out = base / ("round" + std::to_string(round));
        fs::create_directories(out);
        run("critical-points --form " + (data / "p3.json").string() + " --out " + out.string());
        run("skeleton --form " + (data / "p3.json").string() + " --out " + out.string());
        run("exact-loops --form " + (data / "p3.json").string() + " --out " + out.string());
        run("monodromy --path " + (data / "monodromy_path.json").string() + " --out " + out.string());
    }
    for (const char* name : {"critical_points.json", "skeleton.json", "skeleton.csv",
                             "exact_loops.json", "monodromy.json"}) {
        const std::string a = read_all(base / "round0" / name);
        const std::string b = read_all(base / "round1" / name);
        c.require(!a.empty() && a == b, std::string("output differs between runs: ") + name);
    }
    std::error_code ec;
    fs::remove_all(base, ec);
}

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<void(Check&)> body;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1. P3 critical points (the five expected points)", 5.0, criterion_critical_points},
        {"2. skeleton: 3 arcs on symmetry rays, SBS residual < 1e-6", 30.0, criterion_skeleton},
        {"3. exact loops: |action| < 1e-6, area 1/3 of total, basis windings", 10.0,
         criterion_exact_loops},
        {"4. exact <=> D-monotonic on 500 random loops / 20 forms", 300.0, criterion_proposition},
        {"5. monodromy transposition == root braid; control loop identity", 120.0,
         criterion_monodromy},
        {"6. property suite (gradient FD, residues, exactness, Stokes, Morse, flux)", 300.0,
         criterion_properties},
        {"7. CLI determinism: byte-identical reruns", 120.0, criterion_determinism},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Check check;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criterion.body(check);
        } catch (const std::exception& e) {
            check.ok = false;
            check.log << "    exception: " << e.what() << "\n";
        }
        const double dt = seconds_since(t0);
        if (dt > criterion.budget_seconds) {
            check.ok = false;
            check.log << "    runtime " << dt << " s exceeds the " << criterion.budget_seconds
                      << " s budget\n";
        }
        std::cout << (check.ok ? "PASS  " : "FAIL  ") << criterion.name << "  [" << dt << " s]\n";
        std::cout << check.log.str();
        if (!check.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
