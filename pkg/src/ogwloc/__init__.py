"""Exact localization engine for open Gromov-Witten invariants of the real
projective plane family and Welschinger counts of real rational plane
curves.

Everything is computed in exact arithmetic: big rationals, sparse
multivariate polynomials, rational functions with factored linear-form
denominators, and truncated formal power series.  The invariants come from
a fixed-point sum over decorated odd-even trees, cross-checked by an
independent diagrammatic route and by classical floor-diagram counts.
"""

from .descendents import bracket, f0_coeff
from .errors import (
    EvalSingular,
    InvalidKey,
    NonPolynomialResult,
    OgwlocError,
    PreconditionViolated,
    RequestOutsideTruncation,
    SubstitutionSingular,
)
from .invariants import (
    InvariantValue,
    expected_degree,
    ogw,
    ogw_labeled,
    ogw_orbits,
    ogw_via_diagrams,
    vanishing_check,
    welschinger,
)
from .profiles import InvariantKey, Profile, contribution, enumerate_labeled, enumerate_orbits, xi
from .wdvv import kontsevich_nd, wdvv_welschinger

__version__ = "0.1.0"

__all__ = [
    "bracket",
    "f0_coeff",
    "ogw",
    "ogw_labeled",
    "ogw_orbits",
    "ogw_via_diagrams",
    "welschinger",
    "vanishing_check",
    "expected_degree",
    "kontsevich_nd",
    "wdvv_welschinger",
    "InvariantKey",
    "InvariantValue",
    "Profile",
    "contribution",
    "enumerate_labeled",
    "enumerate_orbits",
    "xi",
    "OgwlocError",
    "InvalidKey",
    "SubstitutionSingular",
    "EvalSingular",
    "NonPolynomialResult",
    "PreconditionViolated",
    "RequestOutsideTruncation",
]
