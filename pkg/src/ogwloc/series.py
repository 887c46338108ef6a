"""Truncated multivariate formal power series over an exact coefficient ring.

A Series is a finite dict from exponent tuples to nonzero coefficients,
together with a truncation spec (per-variable caps, plus an optional
weighted total-order cap).  The coefficient ring is pluggable: big
rationals, Gaussian rationals, or rational functions, described by a small
adapter so the series code never needs to know which one it holds.

Coefficient extraction follows the derivative convention used throughout
the engine: extract(f, e) = (d^e f)|_0, i.e. the plain coefficient times
prod(e_i!).
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

from .algebra import RationalFunction
from .errors import PreconditionViolated, RequestOutsideTruncation
from .rationals import RAT_ONE, RAT_ZERO, factorial, rat


class RationalRing:
    """Adapter for plain big-rational coefficients."""

    zero = RAT_ZERO
    one = RAT_ONE

    @staticmethod
    def is_zero(c) -> bool:
        return c == 0

    @staticmethod
    def scale(c, q):
        return c * rat(q)

    @staticmethod
    def from_rational(q):
        return rat(q)


class RFRing:
    """Adapter for RationalFunction coefficients over a fixed space."""

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.zero = RationalFunction.zero(nvars)
        self.one = RationalFunction.const(nvars, 1)

    @staticmethod
    def is_zero(c) -> bool:
        return c.is_zero()

    @staticmethod
    def scale(c, q):
        return c.scale(q)

    def from_rational(self, q):
        return RationalFunction.const(self.nvars, q)


class TruncationSpec:
    """Per-variable exponent caps, with an optional weighted total cap."""

    __slots__ = ("caps", "weights", "bound")

    def __init__(self, caps: Sequence[int], weighted: Optional[tuple[Sequence[int], int]] = None):
        self.caps = tuple(int(c) for c in caps)
        if weighted is None:
            self.weights = None
            self.bound = None
        else:
            self.weights, self.bound = tuple(weighted[0]), int(weighted[1])

    def admits(self, exp: tuple) -> bool:
        if any(e > c for e, c in zip(exp, self.caps)):
            return False
        if self.weights is not None:
            if sum(w * e for w, e in zip(self.weights, exp)) > self.bound:
                return False
        return True

    def __eq__(self, other):
        return (
            isinstance(other, TruncationSpec)
            and self.caps == other.caps
            and self.weights == other.weights
            and self.bound == other.bound
        )

    def __hash__(self):
        return hash((self.caps, self.weights, self.bound))

    def __repr__(self):
        if self.weights is None:
            return f"TruncationSpec({self.caps})"
        return f"TruncationSpec({self.caps}, weighted=({self.weights}, {self.bound}))"


class Series:
    __slots__ = ("vars", "spec", "ring", "coeffs")

    def __init__(self, vars: Sequence[str], spec: TruncationSpec, ring, coeffs: Optional[dict] = None):
        self.vars = tuple(vars)
        self.spec = spec
        self.ring = ring
        self.coeffs = {}
        if coeffs:
            for e, c in coeffs.items():
                if not ring.is_zero(c) and spec.admits(e):
                    self.coeffs[e] = c

    # -- constructors ------------------------------------------------------
    @staticmethod
    def zero(vars, spec, ring) -> "Series":
        return Series(vars, spec, ring)

    @staticmethod
    def const(vars, spec, ring, c) -> "Series":
        return Series(vars, spec, ring, {(0,) * len(vars): c})

    @staticmethod
    def one(vars, spec, ring) -> "Series":
        return Series.const(vars, spec, ring, ring.one)

    def monomial(self, exp: tuple, c) -> "Series":
        return Series(self.vars, self.spec, self.ring, {tuple(exp): c})

    def _zero_exp(self) -> tuple:
        return (0,) * len(self.vars)

    # -- queries -------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, exp: tuple):
        """Plain coefficient of the monomial."""
        return self.coeffs.get(tuple(exp), self.ring.zero)

    def extract(self, exp: tuple):
        """Derivative-convention coefficient: prod(e_i!) times the plain one."""
        exp = tuple(exp)
        if not self.spec.admits(exp):
            raise RequestOutsideTruncation(f"exponent {exp} outside {self.spec}")
        scale = 1
        for e in exp:
            scale *= factorial(e)
        return self.ring.scale(self.coefficient(exp), scale)

    # -- arithmetic -------------------------------------------------------------
    def __add__(self, other: "Series") -> "Series":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e)
            s = c if s is None else s + c
            if self.ring.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return Series(self.vars, self.spec, self.ring, out)

    def __neg__(self) -> "Series":
        return Series(self.vars, self.spec, self.ring, {e: self.ring.scale(c, -1) for e, c in self.coeffs.items()})

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def __mul__(self, other: "Series") -> "Series":
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if not self.spec.admits(e):
                    continue
                p = c1 * c2
                s = out.get(e)
                s = p if s is None else s + p
                if self.ring.is_zero(s):
                    out.pop(e, None)
                else:
                    out[e] = s
        return Series(self.vars, self.spec, self.ring, out)

    def scale(self, q) -> "Series":
        """Scale every coefficient by a rational."""
        return Series(self.vars, self.spec, self.ring, {e: self.ring.scale(c, q) for e, c in self.coeffs.items()})

    def coeff_mul(self, c) -> "Series":
        """Multiply every coefficient by a ring element."""
        return Series(self.vars, self.spec, self.ring, {e: v * c for e, v in self.coeffs.items()})

    def __pow__(self, n: int) -> "Series":
        out = Series.one(self.vars, self.spec, self.ring)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Series) and self.vars == other.vars and self.coeffs == other.coeffs

    def map_coefficients(self, fn: Callable, ring=None) -> "Series":
        ring = ring or self.ring
        return Series(self.vars, self.spec, ring, {e: fn(c) for e, c in self.coeffs.items()})

    # -- exp / log ----------------------------------------------------------------
    def series_exp(self) -> "Series":
        if not self.ring.is_zero(self.coefficient(self._zero_exp())):
            raise PreconditionViolated("series_exp needs zero constant term")
        out = Series.one(self.vars, self.spec, self.ring)
        power = Series.one(self.vars, self.spec, self.ring)
        n = 0
        while True:
            power = power * self
            n += 1
            if power.is_zero():
                break
            out = out + power.scale(rat(1, factorial(n)))
        return out

    def series_log(self) -> "Series":
        if self.coefficient(self._zero_exp()) != self.ring.one:
            raise PreconditionViolated("series_log needs constant term 1")
        u = self - Series.one(self.vars, self.spec, self.ring)
        out = Series.zero(self.vars, self.spec, self.ring)
        power = Series.one(self.vars, self.spec, self.ring)
        n = 0
        while True:
            power = power * u
            n += 1
            if power.is_zero():
                break
            out = out + power.scale(rat((-1) ** (n + 1), n))
        return out

    def __repr__(self):
        return f"Series({self.vars}, {len(self.coeffs)} terms)"

    # -- serialization ---------------------------------------------------------------
    def to_json(self, coeff_to_json: Callable) -> dict:
        return {
            "vars": list(self.vars),
            "caps": list(self.spec.caps),
            "coeffs": [[list(e), coeff_to_json(c)] for e, c in sorted(self.coeffs.items())],
        }


def series_mul(a: Series, b: Series) -> Series:
    return a * b


def series_exp(a: Series) -> Series:
    return a.series_exp()


def series_log(a: Series) -> Series:
    return a.series_log()


def extract(f: Series, exp: tuple):
    return f.extract(exp)
