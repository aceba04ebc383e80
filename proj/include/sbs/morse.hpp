#pragma once

#include <optional>
#include <vector>

#include "sbs/section.hpp"

namespace sbs {

/// Nondegenerate critical point of psi. Hessian eigenvalues are taken with
/// respect to the round metric at scale d (chart invariant); the index is
/// the number of negative ones and is 0 or 1 on a complex 1-dimensional
/// Stein domain.
struct CriticalPoint {
    SpherePoint location;
    int index = 0;
    double value = 0.0;                           // psi at the point
    std::array<double, 2> hessian_eigenvalues{0.0, 0.0};
    std::optional<TangentVector> unstable_direction; // present iff index == 1
};

enum class FlowDirection { Up, Down };

struct Terminus {
    enum class Kind { Critical, Divisor, Unresolved };
    Kind kind = Kind::Unresolved;
    std::optional<CriticalPoint> critical; // set iff kind == Critical
};

struct TrajectorySample {
    double time = 0.0;
    SpherePoint point;
    double psi = 0.0;
};

/// One gradient-flow trajectory. psi is monotone along the samples
/// (increasing for Up, decreasing for Down).
struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::optional<CriticalPoint> origin; // set when launched from a critical point
    Terminus terminus;
};

/// One skeleton arc: the two downward separatrices of a saddle merged into a
/// single curve running endpoint_a -> saddle -> endpoint_b.
struct SkeletonArc {
    std::vector<TrajectorySample> samples;
    CriticalPoint saddle;
    CriticalPoint endpoint_a;
    CriticalPoint endpoint_b;
    bool saddle_to_saddle = false; // flagged, not rejected
};

/// The base set: finite critical points plus finite gradient trajectories.
struct Skeleton {
    std::vector<CriticalPoint> critical_points;
    std::vector<SkeletonArc> arcs;
};

struct FlowControls {
    double rel_tol = 1e-11;
    double abs_tol = 1e-13;
    double psi_cap = 40.0;
    long max_steps = 1'000'000;
    double max_chord = 1e-3;          // max chart-coordinate step between samples
    double grad_stop = 1e-9;          // metric norm threshold for critical capture
    double critical_capture = 1e-6;   // chordal capture radius around critical points
    // Escape capture: psi = psi_cap may demand coordinate increments below
    // machine epsilon near a unit-modulus zero, so approaching the divisor
    // this closely also terminates the trajectory.
    double divisor_capture = 1e-7;
    std::vector<CriticalPoint> critical_points; // optional known critical set
};

struct CriticalFinderOptions {
    int grid_density = 64;      // seeds per chart edge
    double newton_tol = 1e-11;  // metric gradient-norm acceptance
    double dedupe_radius = 1e-7;
    double degenerate_tol = 1e-9;
    double near_discriminant = 1e-6;
};

struct SkeletonOptions {
    CriticalFinderOptions finder;
    FlowControls flow;
    double launch_offset = 1e-5;
    double sbs_tol = 1e-6; // max |Im rho(unit tangent)| over arc samples
};

/// Riemannian gradient of psi with respect to the round metric at scale d.
/// Satisfies <grad psi, v>_g = d(psi)(v).
TangentVector gradient_field(const BinaryForm& form, const SpherePoint& p);

/// All critical points of psi, grid-seeded and Newton-refined, sorted by
/// (chart, re, im). Throws NearDiscriminant when the form has nearly
/// multiple zeros and DegenerateCritical on non-Morse structure.
std::vector<CriticalPoint> find_critical_points(const BinaryForm& form,
                                                const CriticalFinderOptions& opts = {});

/// Integrate d(point)/dt = +-grad(psi) adaptively with chart switching.
Trajectory integrate_flow(const BinaryForm& form, const SpherePoint& start, FlowDirection direction,
                          const FlowControls& controls = {});

/// Assemble the base set: critical points plus the saddles' downward
/// separatrices, each pair merged into one arc.
Skeleton extract_skeleton(const BinaryForm& form, const SkeletonOptions& opts = {});

/// |Im rho(unit tangent)| at interior samples of an arc (secant tangents);
/// the quantity the special Bohr-Sommerfeld criterion requires to vanish.
double max_sbs_residual(const BinaryForm& form, const std::vector<TrajectorySample>& samples);

} // namespace sbs
