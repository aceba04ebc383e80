#pragma once

#include <span>
#include <vector>

#include "sbs/section.hpp"

namespace sbs {

/// Closed sampled curve on the sphere, uniformly parameterized over [0, 2pi);
/// samples[N] is identified with samples[0]. Loop integrals differentiate the
/// sample sequence spectrally, so N must be a power of two (>= 64), and the
/// curve must avoid the divisor by chordal 1e-6 with adjacent gaps < 0.05.
struct LoopCurve {
    std::vector<SpherePoint> samples;

    std::size_t size() const { return samples.size(); }
};

/// Loop diagnostics. `winding` is anchored to the Affine0 chart: entry j is
/// the plane winding number of the loop around divisor point j (zeros at
/// [0:1] get 0). `enclosed_area` is the independent Fubini-Study contour
/// area of the disc the loop bounds in that anchor, in c1 units.
struct LoopReport {
    double action = 0.0;
    double enclosed_area = 0.0;
    std::vector<int> winding;
    Complex holonomy{1.0, 0.0};
    bool is_exact = false;
    bool is_d_monotonic = false;
    double fs_length = 0.0;
};

struct LoopOptions {
    int samples = 256;
    double action_tol = 1e-6;
    double divisor_margin = 1e-5; // expansion stops this close to another zero
    double max_center_radius = 1e6;
};

/// Integral of the Liouville form over the loop (orientation = sample order).
/// Throws ResolutionTooCoarse when halving the sample count moves the value
/// by more than 1e-6.
double action_integral(const BinaryForm& form, const LoopCurve& loop);

/// Per-zero winding numbers by accumulated argument, Affine0-anchored.
/// Throws AmbiguousWinding when an accumulation is > 0.05 from an integer.
std::vector<int> winding_numbers(const BinaryForm& form, const LoopCurve& loop);

/// Area of the bounded disc through the Stokes-with-residues identity
/// action/(2 pi) + sum(winding). Requires an embedded loop.
double enclosed_area(const BinaryForm& form, const LoopCurve& loop);

/// Independent area route: contour integral of the Fubini-Study primitive
/// (s/2pi) (x dy - y dx)/(1+|z|^2); no reference to the section.
double enclosed_area_quadrature(const LoopCurve& loop, double scale);

/// Prequantization holonomy exp(-i * action); 1 for Bohr-Sommerfeld loops.
Complex holonomy(const BinaryForm& form, const LoopCurve& loop);

/// Round loops centered at the indexed zero, radius tuned by bisection until
/// the action vanishes. Throws NoExactRadius when the one-parameter family
/// has no exact member (bracket fails before reaching another zero).
LoopCurve construct_exact_loop(const BinaryForm& form, int zero_index, const LoopOptions& opts = {});

/// Fill a LoopReport and evaluate exactness (|action| < tol) against
/// D-monotonicity (|area - sum winding| < tol), the two flags the
/// equivalence theorem ties together. Tolerances scale with loop length.
LoopReport check_proposition(const BinaryForm& form, const LoopCurve& loop, double action_tol = 1e-6,
                             double area_tol = 1e-6);

/// L2 pairing of two zero-mean sampled functions against the arc-length
/// measure of the round metric restricted to the loop (mean subtracted).
double loop_inner_product(const BinaryForm& form, const LoopCurve& loop, std::span<const double> f1,
                          std::span<const double> f2);

/// Arc length of the loop in the round metric at the form's scale.
double loop_fs_length(const LoopCurve& loop, double scale);

/// Throws unless the loop meets the LoopCurve invariants for this form.
void validate_loop(const BinaryForm& form, const LoopCurve& loop);

/// Self-intersection test at sample resolution (Affine0 projection).
bool loop_is_embedded(const LoopCurve& loop);

} // namespace sbs
