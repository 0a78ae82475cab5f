"""Constrained maximizers on spheres.

Level curve eta(r), multiplier map phi(lambda), feasibility gate, and the
multiplicity detector for differentiable functionals on R^n, backed by the
C++ core.
"""

from _spherimax import (
    DEFAULT_SEED,
    ProblemInstance,
    SpherimaxError,
    Tolerances,
    build_phi_map,
    check_condition,
    compute_eta,
    detect_multiplicity,
    max_on_sphere,
    tabulate_curve,
)

__all__ = [
    "DEFAULT_SEED",
    "ProblemInstance",
    "SpherimaxError",
    "Tolerances",
    "build_phi_map",
    "check_condition",
    "compute_eta",
    "detect_multiplicity",
    "max_on_sphere",
    "tabulate_curve",
]
