#pragma once

#include <optional>
#include <vector>

#include "sbs/loops.hpp"

namespace sbs {

/// Fiber of the forgetful map over one form: one sheet per simple zero,
/// carrying the exact loop around that zero. Sheets whose circle family has
/// no exact member stay as explicit gaps instead of failing the fiber.
struct ModuliFiber {
    BinaryForm form;
    struct Sheet {
        int zero_index = 0;           // index into divisor_roots(form)
        SpherePoint zero;
        std::optional<LoopCurve> loop;
        std::optional<LoopReport> report;
    };
    std::vector<Sheet> sheets;
    std::vector<int> gaps; // zero indices without an exact loop
};

/// Polygonal path in coefficient space; closed iff first and last steps agree
/// up to overall complex scale.
struct CoefficientPath {
    std::vector<BinaryForm> steps;

    bool is_closed(double tol = 1e-12) const;
};

struct MonodromyResult {
    std::vector<int> permutation; // sheet i of the base ends at zero permutation[i]
    CoefficientPath path;
};

struct ContinuationOptions {
    LoopOptions loop;
    double discriminant_margin = 1e-4;
    bool rebuild_loops_each_step = true;
};

/// Construct the exact loop for every zero of the form.
ModuliFiber enumerate_fiber(const BinaryForm& form, const LoopOptions& opts = {});

/// Track the fiber along the path: roots matched nearest-neighbor step to
/// step (unambiguous margin required), loops rebuilt around the continued
/// zeros. Throws ContinuationBroken when a matching is ambiguous and
/// PathInvalid when a step violates the discriminant margin.
ModuliFiber continue_fiber(const CoefficientPath& path, const ModuliFiber& start,
                           const ContinuationOptions& opts = {});

/// Sheet permutation induced by a closed path.
MonodromyResult monodromy(const CoefficientPath& path, const ModuliFiber& base,
                          const ContinuationOptions& opts = {});

/// Root braid along the path, ignoring loops entirely: the independent check
/// for monodromy permutations.
std::vector<int> root_braid_permutation(const CoefficientPath& path,
                                        double discriminant_margin = 1e-4);

/// Smallest t with discriminant_distance(form + t * direction) < 1e-6,
/// bisected to bracket width < 1e-8 inside [0, t_max].
double locate_discriminant(const BinaryForm& form, const BinaryForm& direction, double t_max = 1.0);

} // namespace sbs
