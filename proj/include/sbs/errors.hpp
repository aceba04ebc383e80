#pragma once

#include <stdexcept>
#include <string>

namespace sbs {

/// Error taxonomy shared by the library and the CLI exit-code mapping.
enum class ErrorKind {
    InvalidInput,        // malformed form/loop/path/config
    DivisorPole,         // evaluation on or too near the zero divisor
    IllConditioned,      // root polishing failed to converge
    DegenerateCritical,  // non-Morse critical structure
    NearDiscriminant,    // form too close to a multiple zero
    SkeletonIncomplete,  // a separatrix did not resolve
    ResolutionTooCoarse, // loop quadrature failed the Richardson check
    AmbiguousWinding,    // winding accumulation too far from an integer
    SelfIntersecting,    // loop is not embedded at sample resolution
    NoExactRadius,       // circle family contains no exact representative
    ContinuationBroken,  // root matching ambiguous along a path
    NoSignChange,        // discriminant search bracket never closes
    PathInvalid,         // coefficient path violates its invariants
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

namespace detail {
[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }
} // namespace detail

[[noreturn]] inline void throw_invalid_input(const std::string& w) { detail::raise(ErrorKind::InvalidInput, w); }
[[noreturn]] inline void throw_divisor_pole(const std::string& w) { detail::raise(ErrorKind::DivisorPole, w); }
[[noreturn]] inline void throw_ill_conditioned(const std::string& w) { detail::raise(ErrorKind::IllConditioned, w); }
[[noreturn]] inline void throw_degenerate_critical(const std::string& w) { detail::raise(ErrorKind::DegenerateCritical, w); }
[[noreturn]] inline void throw_near_discriminant(const std::string& w) { detail::raise(ErrorKind::NearDiscriminant, w); }
[[noreturn]] inline void throw_skeleton_incomplete(const std::string& w) { detail::raise(ErrorKind::SkeletonIncomplete, w); }
[[noreturn]] inline void throw_resolution_too_coarse(const std::string& w) { detail::raise(ErrorKind::ResolutionTooCoarse, w); }
[[noreturn]] inline void throw_ambiguous_winding(const std::string& w) { detail::raise(ErrorKind::AmbiguousWinding, w); }
[[noreturn]] inline void throw_self_intersecting(const std::string& w) { detail::raise(ErrorKind::SelfIntersecting, w); }
[[noreturn]] inline void throw_no_exact_radius(const std::string& w) { detail::raise(ErrorKind::NoExactRadius, w); }
[[noreturn]] inline void throw_continuation_broken(const std::string& w) { detail::raise(ErrorKind::ContinuationBroken, w); }
[[noreturn]] inline void throw_no_sign_change(const std::string& w) { detail::raise(ErrorKind::NoSignChange, w); }
[[noreturn]] inline void throw_path_invalid(const std::string& w) { detail::raise(ErrorKind::PathInvalid, w); }

/// Exit-code contract used by the CLI front end.
inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DegenerateCritical: return 2;
        case ErrorKind::NearDiscriminant: return 3;
        case ErrorKind::PathInvalid:
        case ErrorKind::ContinuationBroken: return 4;
        default: return 1;
    }
}

} // namespace sbs
