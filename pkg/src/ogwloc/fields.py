"""Coefficient fields for evaluating fixed-point contributions.

Contributions are rational functions of the residual weights l1..lm.  The
same block formulas are evaluated against one of two value types:

  * SymbolicField - values are RationalFunction over l1..lm.  This is the
    reference: exact, and the final sum can be certified to be a
    polynomial of the expected homogeneity degree.

  * GradedEvalField - values are exact rationals obtained by evaluating at
    a fixed rational point, paired with a homogeneity degree that is
    tracked through products and checked on every addition.  For m = 1
    every nonzero linear form in l1 is a nonzero multiple of l1, so
    evaluation at l1 = 1 is faithful (a denominator can vanish only if the
    form itself is zero); for m >= 2 a generic point makes this a fast
    exact filter rather than a proof, and the symbolic field remains the
    ground truth.

Degrees are in exponent units (one per variable); the Z-grading used for
expected degrees counts each weight as 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .algebra import Polynomial, RationalFunction, canon_linear, lambda_space, rho_t_images
from .correlators import correlator_tuple
from .errors import EvalSingular
from .rationals import RAT_ZERO, factorial, rat


def rho_alpha_values(m: int, point: Sequence) -> list:
    """Values of a0..a{2m} at the given l-point under the specialization."""
    point = [rat(p) for p in point]
    vals = [RAT_ZERO]
    vals.extend(point)
    vals.extend(-p for p in reversed(point))
    return vals


def rho_alpha_forms(m: int) -> list:
    """Images of a0..a{2m} as coefficient rows over l1..lm."""
    return rho_t_images(m)[: 2 * m + 1]


@dataclass(frozen=True)
class GradedValue:
    """Exact value of a homogeneous quantity together with its degree."""

    val: object
    deg: Optional[int]  # None iff val == 0

    def is_zero(self) -> bool:
        return self.deg is None

    def __mul__(self, other: "GradedValue") -> "GradedValue":
        if self.is_zero() or other.is_zero():
            return GRADED_ZERO
        return GradedValue(self.val * other.val, self.deg + other.deg)

    def __truediv__(self, other: "GradedValue") -> "GradedValue":
        if other.is_zero():
            raise EvalSingular("division by zero graded value")
        if self.is_zero():
            return GRADED_ZERO
        return GradedValue(self.val / other.val, self.deg - other.deg)

    def __add__(self, other: "GradedValue") -> "GradedValue":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.deg != other.deg:
            raise AssertionError(f"inhomogeneous sum: degrees {self.deg} and {other.deg}")
        s = self.val + other.val
        return GradedValue(s, self.deg) if s != 0 else GRADED_ZERO

    def __neg__(self) -> "GradedValue":
        if self.is_zero():
            return self
        return GradedValue(-self.val, self.deg)

    def __pow__(self, n: int) -> "GradedValue":
        if n == 0:
            return GradedValue(rat(1), 0)
        if self.is_zero():
            return GRADED_ZERO
        return GradedValue(self.val**n, self.deg * n)


GRADED_ZERO = GradedValue(RAT_ZERO, None)


class GradedEvalField:
    """Exact evaluation at a fixed l-point with degree tracking."""

    def __init__(self, m: int, point: Optional[Sequence] = None):
        self.m = m
        self.point = tuple(rat(p) for p in (point if point is not None else (1,) * m))
        self.alpha_vals = rho_alpha_values(m, self.point)
        prod = rat(1)
        for p in self.point:
            prod *= p
        self._lam_prod = GradedValue(prod, m) if prod != 0 else GRADED_ZERO
        self._tails: dict = {}

    def zero(self) -> GradedValue:
        return GRADED_ZERO

    def from_rat(self, q, deg: int = 0) -> GradedValue:
        q = rat(q)
        return GradedValue(q, deg) if q != 0 else GRADED_ZERO

    def alpha(self, a: int) -> GradedValue:
        v = self.alpha_vals[a]
        return GradedValue(v, 1) if v != 0 else GRADED_ZERO

    def lam_prod(self) -> GradedValue:
        return self._lam_prod

    def linear_alpha(self, coeffs: Sequence) -> GradedValue:
        """sum coeffs[i] * alpha_i as a graded value (zero only if the
        specialized form is the zero form, which eval treats as singular
        when divided by)."""
        v = RAT_ZERO
        for c, av in zip(coeffs, self.alpha_vals):
            if c:
                v += rat(c) * av
        if v == 0:
            # distinguish a zero *form* from an accidental zero of a nonzero
            # form: recompute symbolically
            form = [RAT_ZERO] * self.m
            images = rho_alpha_forms(self.m)
            for c, img in zip(coeffs, images):
                if c and img is not None:
                    for t, ct in enumerate(img):
                        form[t] += rat(c) * rat(ct)
            canon, _ = canon_linear(form)
            if canon is not None:
                raise EvalSingular(f"nonzero form {coeffs} vanishes at point {self.point}")
            return GRADED_ZERO
        return GradedValue(v, 1)

    def tail(self, a: int, d, dt: int, cv: tuple, q_cap: int, eta_caps: tuple) -> GradedValue:
        """prod(cv_j!) times the plain (Q^dt, eta^cv) coefficient of the
        correlator at h = a_a/d, specialized and evaluated."""
        d = rat(d)
        key = (a, d, dt, tuple(cv), q_cap, tuple(eta_caps))
        if key in self._tails:
            return self._tails[key]
        series = correlator_tuple(self.m, q_cap, tuple(eta_caps))[a]
        rf = series.coefficient((dt,) + tuple(cv))
        if rf.is_zero():
            out = GRADED_ZERO
        else:
            deg = rf.degree()
            assert deg is not None, "correlator coefficient must be homogeneous"
            point = list(self.alpha_vals) + [self.alpha_vals[a] / d]
            v = rf.eval(point)
            scale = 1
            for c in cv:
                scale *= factorial(c)
            v *= scale
            out = GradedValue(v, deg) if v != 0 else GRADED_ZERO
        self._tails[key] = out
        return out

    def finalize(self, total: GradedValue, expected_z_degree: int):
        """Return (value-at-point, exponent-degree); checks homogeneity."""
        if total.is_zero():
            return RAT_ZERO, None
        assert 2 * total.deg == expected_z_degree, (
            f"contribution degree {2 * total.deg} != expected {expected_z_degree}"
        )
        return total.val, total.deg


class SymbolicField:
    """Values are rational functions of l1..lm."""

    def __init__(self, m: int):
        self.m = m
        self.nvars = len(lambda_space(m))
        self._alpha_forms = rho_alpha_forms(m)
        self._tails: dict = {}

    def zero(self) -> RationalFunction:
        return RationalFunction.zero(self.nvars)

    def from_rat(self, q, deg: int = 0) -> RationalFunction:
        if deg != 0 and rat(q) != 0:
            raise ValueError("nonzero rational with nonzero degree is not symbolic")
        return RationalFunction.const(self.nvars, q)

    def alpha(self, a: int) -> RationalFunction:
        img = self._alpha_forms[a]
        if img is None:
            return RationalFunction.zero(self.nvars)
        return RationalFunction(Polynomial.from_linear(self.nvars, img))

    def lam_prod(self) -> RationalFunction:
        out = RationalFunction.const(self.nvars, 1)
        for i in range(self.nvars):
            out = out * RationalFunction.variable(self.nvars, i)
        return out

    def linear_alpha(self, coeffs: Sequence) -> RationalFunction:
        form = [RAT_ZERO] * self.nvars
        for c, img in zip(coeffs, self._alpha_forms):
            if c and img is not None:
                for t, ct in enumerate(img):
                    form[t] += rat(c) * rat(ct)
        return RationalFunction(Polynomial.from_linear(self.nvars, form))

    def tail(self, a: int, d, dt: int, cv: tuple, q_cap: int, eta_caps: tuple) -> RationalFunction:
        d = rat(d)
        key = (a, d, dt, tuple(cv), q_cap, tuple(eta_caps))
        if key in self._tails:
            return self._tails[key]
        series = correlator_tuple(self.m, q_cap, tuple(eta_caps))[a]
        rf = series.coefficient((dt,) + tuple(cv))
        if rf.is_zero():
            out = self.zero()
        else:
            n_full = 2 * self.m + 2
            h_image = [rat(c) / d for c in self._alpha_forms[a]]
            images = [img if img is not None else None for img in self._alpha_forms]
            images = list(images) + [h_image]
            out = rf.substitute(images, self.nvars)
            scale = 1
            for c in cv:
                scale *= factorial(c)
            out = out.scale(scale)
        self._tails[key] = out
        return out

    def finalize(self, total: RationalFunction, expected_z_degree: int):
        return total, expected_z_degree // 2
