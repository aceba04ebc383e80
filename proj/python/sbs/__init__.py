"""Bohr-Sommerfeld geometry of holomorphic-section complements on the sphere."""

from _sbs import (
    BinaryForm,
    SbsError,
    action_integral,
    check_proposition,
    construct_exact_loop,
    critical_points,
    discriminant_distance,
    divisor_roots,
    enclosed_area,
    exact_loops,
    holonomy,
    kahler_potential,
    locate_discriminant,
    monodromy,
    root_braid,
    section_norm,
    skeleton,
    winding_numbers,
)

__all__ = [
    "BinaryForm",
    "SbsError",
    "action_integral",
    "check_proposition",
    "construct_exact_loop",
    "critical_points",
    "discriminant_distance",
    "divisor_roots",
    "enclosed_area",
    "exact_loops",
    "holonomy",
    "kahler_potential",
    "locate_discriminant",
    "monodromy",
    "root_braid",
    "section_norm",
    "skeleton",
    "winding_numbers",
]
