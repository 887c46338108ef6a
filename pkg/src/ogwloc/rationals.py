"""Exact scalar arithmetic: big rationals and Gaussian rationals.

The whole engine is exact; there is no floating point anywhere.  Rationals
are provided by a compiled backend (gmpy2.mpq) when available, with
fractions.Fraction as a pure-Python fallback selected at import time.  Both
store values in lowest terms with a positive denominator and implement exact
field arithmetic, which is all the rest of the code relies on.

`benchmarks/bench_backends.py` compares the two backends; force the fallback
by setting OGWLOC_PURE_PYTHON=1 before import.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

if os.environ.get("OGWLOC_PURE_PYTHON"):
    from fractions import Fraction as _Q

    BACKEND = "fractions"
else:
    try:
        from gmpy2 import mpq as _Q  # type: ignore[no-redef]

        BACKEND = "gmpy2"
    except ImportError:  # pragma: no cover - exercised via OGWLOC_PURE_PYTHON
        from fractions import Fraction as _Q  # type: ignore[assignment]

        BACKEND = "fractions"

#: The rational constructor of the selected backend.  rat(p, q) is p/q in
#: lowest terms; values compare and hash like ordinary numbers.
rat = _Q

RAT_ZERO = rat(0)
RAT_ONE = rat(1)


def is_rational(x: object) -> bool:
    return isinstance(x, (int, _Q))


def rat_from_str(s: str):
    """Parse "p" or "p/q" (exact decimal-free integers only)."""
    s = s.strip()
    if "/" in s:
        p, q = s.split("/")
        return rat(int(p), int(q))
    return rat(int(s))


def rat_to_str(x) -> str:
    """Serialize as "p" or "p/q" in lowest terms."""
    x = rat(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def factorial(n: int) -> int:
    import math

    return math.factorial(n)


def binomial(n: int, k: int) -> int:
    import math

    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def double_factorial(n: int) -> int:
    """n!! for odd n >= -1 (empty product for n in {-1, 1} is 1)."""
    if n < 0:
        return 1
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@dataclass(frozen=True)
class GaussianScalar:
    """Exact Gaussian rational re + im*i with (0,1)^2 = (-1,0)."""

    re: object
    im: object

    @staticmethod
    def of(re, im=0) -> "GaussianScalar":
        return GaussianScalar(rat(re), rat(im))

    @staticmethod
    def i_power(k: int) -> "GaussianScalar":
        k %= 4
        return (
            GaussianScalar.of(1),
            GaussianScalar.of(0, 1),
            GaussianScalar.of(-1),
            GaussianScalar.of(0, -1),
        )[k]

    def __add__(self, other: "GaussianScalar") -> "GaussianScalar":
        return GaussianScalar(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianScalar") -> "GaussianScalar":
        return GaussianScalar(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussianScalar") -> "GaussianScalar":
        return GaussianScalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "GaussianScalar") -> "GaussianScalar":
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by Gaussian zero")
        return GaussianScalar(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __neg__(self) -> "GaussianScalar":
        return GaussianScalar(-self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0
