"""Exception types shared across the engine."""

from __future__ import annotations


class OgwlocError(Exception):
    """Base class for all engine errors."""


class SubstitutionSingular(OgwlocError):
    """A denominator factor maps to the zero form under a substitution."""


class EvalSingular(OgwlocError):
    """A denominator factor vanishes at the requested evaluation point."""


class PreconditionViolated(OgwlocError):
    """An operation was called outside its stated precondition."""


class RequestOutsideTruncation(OgwlocError):
    """A series coefficient was requested beyond the truncation spec."""


class InvalidKey(OgwlocError):
    """An invariant or correlator key violates stability or orientability."""


class NonPolynomialResult(OgwlocError):
    """An assembled invariant kept a denominator after reduction (a bug)."""
