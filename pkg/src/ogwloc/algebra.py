"""Sparse exact multivariate polynomials and rational functions.

Variables are positional: a "space" is just a tuple of variable names, and a
polynomial over an n-variable space maps exponent tuples of length n to
nonzero rationals.  The spaces used by the engine are

    alpha_hbar_space(m) = (a0, ..., a{2m}, h)      the full torus weights
    lambda_space(m)     = (l1, ..., lm)            the residual torus weights

A RationalFunction keeps its denominator as a multiset of *linear forms*
(no constant term), never expanded: every denominator produced by the
localization sums is a product of linear forms, so cancellation only ever
requires exact division by a linear factor.  Linear forms are canonicalized
to coprime integer coefficients with positive leading coefficient; the
scalar absorbed by canonicalization is folded into the numerator.  After
`_reduce` the representation (numerator, denominator multiset) is unique,
so equality and hashing are structural.

Substitutions map variables to linear forms of a target space, which covers
the weight specialization a0 -> 0, ai -> li, a{2m+1-i} -> -li as well as
h -> (ai - aj)/n and h -> ai/d.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence

from .errors import EvalSingular, SubstitutionSingular
from .rationals import RAT_ONE, RAT_ZERO, rat, rat_from_str, rat_to_str

Exponent = tuple  # tuple[int, ...]
Form = tuple  # tuple[int, ...], canonical linear form


def alpha_hbar_space(m: int) -> tuple:
    return tuple(f"a{i}" for i in range(2 * m + 1)) + ("h",)


def lambda_space(m: int) -> tuple:
    return tuple(f"l{i}" for i in range(1, m + 1))


def canon_linear(coeffs: Sequence) -> tuple[Optional[Form], object]:
    """Canonicalize a rational linear form.

    Returns (form, scale) with coeffs == scale * form, where form has coprime
    integer entries and positive first nonzero entry.  A zero form returns
    (None, 0).
    """
    from math import gcd

    coeffs = [rat(c) for c in coeffs]
    lead = next((c for c in coeffs if c != 0), None)
    if lead is None:
        return None, RAT_ZERO
    denom_lcm = 1
    for c in coeffs:
        if c != 0:
            q = int(c.denominator)
            denom_lcm = denom_lcm * q // gcd(denom_lcm, q)
    ints = [int(c * denom_lcm) for c in coeffs]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    sign = 1 if next(v for v in ints if v != 0) > 0 else -1
    form = tuple(v // (g * sign) for v in ints)
    # coeffs = scale * form with scale = sign*g/denom_lcm
    return form, rat(sign * g, denom_lcm)


class Polynomial:
    """Sparse polynomial: dict from exponent tuple to nonzero rational."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Optional[dict] = None):
        self.nvars = nvars
        self.terms = terms or {}

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero(nvars: int) -> "Polynomial":
        return Polynomial(nvars)

    @staticmethod
    def const(nvars: int, c) -> "Polynomial":
        c = rat(c)
        if c == 0:
            return Polynomial(nvars)
        return Polynomial(nvars, {(0,) * nvars: c})

    @staticmethod
    def variable(nvars: int, idx: int, c=1) -> "Polynomial":
        e = [0] * nvars
        e[idx] = 1
        return Polynomial(nvars, {tuple(e): rat(c)})

    @staticmethod
    def from_linear(nvars: int, coeffs: Sequence) -> "Polynomial":
        terms = {}
        for i, c in enumerate(coeffs):
            c = rat(c)
            if c != 0:
                e = [0] * nvars
                e[i] = 1
                terms[tuple(e)] = c
        return Polynomial(nvars, terms)

    # -- predicates ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(v == 0 for v in e) for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * self.nvars, RAT_ZERO)

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> Optional[int]:
        """Return the common total degree, or None if inhomogeneous/zero."""
        degs = {sum(e) for e in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, RAT_ZERO) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return Polynomial(self.nvars, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, RAT_ZERO) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return Polynomial(self.nvars, out)

    def scale(self, c) -> "Polynomial":
        c = rat(c)
        if c == 0:
            return Polynomial(self.nvars)
        return Polynomial(self.nvars, {e: v * c for e, v in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative polynomial power")
        out = Polynomial.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- evaluation / substitution ----------------------------------------
    def eval(self, point: Sequence):
        point = [rat(p) for p in point]
        total = RAT_ZERO
        for e, c in self.terms.items():
            v = c
            for i, k in enumerate(e):
                if k:
                    v = v * point[i] ** k
            total += v
        return total

    def substitute_linear(self, images: Sequence[Optional[Sequence]], target_nvars: int) -> "Polynomial":
        """Map variable i to the linear form images[i] (None means 0)."""
        img_polys = [
            Polynomial.from_linear(target_nvars, img) if img is not None else Polynomial.zero(target_nvars)
            for img in images
        ]
        powers: list[dict[int, Polynomial]] = [dict() for _ in img_polys]

        def power(i: int, k: int) -> Polynomial:
            if k == 0:
                return Polynomial.const(target_nvars, 1)
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * img_polys[i]
            return cache[k]

        out = Polynomial.zero(target_nvars)
        for e, c in self.terms.items():
            term = Polynomial.const(target_nvars, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
                    if term.is_zero():
                        break
            out = out + term
        return out

    def divmod_linear(self, form: Form) -> tuple[Optional["Polynomial"], bool]:
        """Exact division by a canonical linear form; (quotient, True) or (None, False)."""
        pivot = next(i for i, c in enumerate(form) if c != 0)
        c_p = rat(form[pivot])
        # form = c_p * x_pivot - M  with M free of x_pivot
        m_terms = {}
        for i, c in enumerate(form):
            if i != pivot and c != 0:
                e = [0] * self.nvars
                e[i] = 1
                m_terms[tuple(e)] = rat(-c)
        M = Polynomial(self.nvars, m_terms)

        by_deg: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[pivot]
            stripped = e[:pivot] + (0,) + e[pivot + 1 :]
            by_deg.setdefault(k, {})[stripped] = c
        if not by_deg:
            return Polynomial.zero(self.nvars), True
        D = max(by_deg)
        quotient_layers: dict[int, Polynomial] = {}
        q_above = Polynomial.zero(self.nvars)
        for k in range(D, 0, -1):
            p_k = Polynomial(self.nvars, by_deg.get(k, {}))
            q_km1 = (p_k + M * q_above).scale(1 / c_p)
            quotient_layers[k - 1] = q_km1
            q_above = q_km1
        remainder = Polynomial(self.nvars, by_deg.get(0, {})) + M * q_above
        if not remainder.is_zero():
            return None, False
        out: dict = {}
        for k, layer in quotient_layers.items():
            for e, c in layer.terms.items():
                full = e[:pivot] + (e[pivot] + k,) + e[pivot + 1 :]
                out[full] = c
        return Polynomial(self.nvars, out), True

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self.terms!r})"

    # -- serialization -----------------------------------------------------
    def to_json(self) -> list:
        return [[list(e), rat_to_str(c)] for e, c in sorted(self.terms.items())]

    @staticmethod
    def from_json(nvars: int, data: list) -> "Polynomial":
        return Polynomial(nvars, {tuple(e): rat_from_str(c) for e, c in data})


class RationalFunction:
    """num / prod(form^mult) with factored linear-form denominator.

    Instances are immutable and kept reduced: no denominator factor divides
    the numerator, so structural equality is semantic equality.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Optional[Mapping[Form, int]] = None, _reduced: bool = False):
        den = dict(den) if den else {}
        if num.is_zero():
            den = {}
        elif den and not _reduced:
            num, den = _cancel(num, den)
        self.num = num
        self.den = den

    # -- constructors -----------------------------------------------------
    @staticmethod
    def zero(nvars: int) -> "RationalFunction":
        return RationalFunction(Polynomial.zero(nvars))

    @staticmethod
    def const(nvars: int, c) -> "RationalFunction":
        return RationalFunction(Polynomial.const(nvars, c))

    @staticmethod
    def variable(nvars: int, idx: int) -> "RationalFunction":
        return RationalFunction(Polynomial.variable(nvars, idx))

    @staticmethod
    def from_num_den_forms(num: Polynomial, forms: Iterable[Sequence]) -> "RationalFunction":
        """Build num / prod(linear forms); raises on a zero form."""
        den: dict = {}
        scale = RAT_ONE
        for coeffs in forms:
            form, s = canon_linear(coeffs)
            if form is None:
                raise ZeroDivisionError("zero linear form in denominator")
            scale *= s
            den[form] = den.get(form, 0) + 1
        return RationalFunction(num.scale(1 / scale), den)

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return not self.den

    def den_degree(self) -> int:
        return sum(self.den.values())

    def degree(self) -> Optional[int]:
        """Homogeneity degree, or None if the numerator is inhomogeneous."""
        if self.num.is_zero():
            return None
        d = self.num.is_homogeneous()
        if d is None:
            return None
        return d - self.den_degree()

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        union: dict = dict(self.den)
        for f, k in other.den.items():
            union[f] = max(union.get(f, 0), k)
        a = self.num
        for f, k in union.items():
            extra = k - self.den.get(f, 0)
            for _ in range(extra):
                a = a * Polynomial.from_linear(self.nvars, f)
        b = other.num
        for f, k in union.items():
            extra = k - other.den.get(f, 0)
            for _ in range(extra):
                b = b * Polynomial.from_linear(self.nvars, f)
        return RationalFunction(a + b, union)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den, _reduced=True)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        if self.is_zero() or other.is_zero():
            return RationalFunction.zero(self.nvars)
        den = dict(self.den)
        for f, k in other.den.items():
            den[f] = den.get(f, 0) + k
        return RationalFunction(self.num * other.num, den)

    def scale(self, c) -> "RationalFunction":
        c = rat(c)
        if c == 0:
            return RationalFunction.zero(self.nvars)
        return RationalFunction(self.num.scale(c), self.den, _reduced=True)

    def inverse(self) -> "RationalFunction":
        """Invert; the numerator must factor into linear forms (it always is
        a scaled monomial or a power of a linear form wherever the engine
        divides)."""
        factors, scalar = _factor_into_linears(self.num)
        if factors is None:
            raise ZeroDivisionError("cannot invert: numerator is not a product of linear forms")
        num = Polynomial.const(self.nvars, 1 / scalar)
        for f, k in self.den.items():
            for _ in range(k):
                num = num * Polynomial.from_linear(self.nvars, f)
        den: dict = {}
        for f, k in factors.items():
            den[f] = den.get(f, 0) + k
        return RationalFunction(num, den)

    def __truediv__(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return self * other.inverse()
        return self.scale(1 / rat(other))

    def __pow__(self, n: int) -> "RationalFunction":
        if n < 0:
            return self.inverse() ** (-n)
        out = RationalFunction.const(self.nvars, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, frozenset(self.den.items())))

    # -- reduction ----------------------------------------------------------
    def reduce(self) -> "RationalFunction":
        """Idempotent: instances are already canonical."""
        return self

    # -- evaluation / substitution -------------------------------------------
    def eval(self, point: Sequence):
        point = [rat(p) for p in point]
        value = self.num.eval(point)
        for f, k in self.den.items():
            d = sum(rat(c) * point[i] for i, c in enumerate(f) if c)
            if d == 0:
                raise EvalSingular(f"denominator form {f} vanishes at {point}")
            value = value / d**k
        return value

    def substitute(self, images: Sequence[Optional[Sequence]], target_nvars: int) -> "RationalFunction":
        """Variable i maps to linear form images[i] over the target space."""
        den: dict = {}
        scale = RAT_ONE
        for f, k in self.den.items():
            img = [RAT_ZERO] * target_nvars
            for i, c in enumerate(f):
                if c and images[i] is not None:
                    for j, cj in enumerate(images[i]):
                        img[j] += rat(c) * rat(cj)
            form, s = canon_linear(img)
            if form is None:
                raise SubstitutionSingular(f"denominator form {f} maps to zero")
            scale *= s**k
            den[form] = den.get(form, 0) + k
        num = self.num.substitute_linear(images, target_nvars).scale(1 / scale)
        return RationalFunction(num, den)

    def __repr__(self):
        return f"RationalFunction({self.num!r}, {self.den!r})"

    # -- serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "num": self.num.to_json(),
            "den": [[list(f), k] for f, k in sorted(self.den.items())],
        }

    @staticmethod
    def from_json(nvars: int, data: dict) -> "RationalFunction":
        num = Polynomial.from_json(nvars, data["num"])
        den = {tuple(f): k for f, k in data["den"]}
        return RationalFunction(num, den, _reduced=True)


_PREFILTER_SEEDS = (
    (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41),
    (43, 47, 5, 59, 61, 67, 71, 73, 79, 83, 89, 97),
)


def _divisibility_possible(num: Polynomial, form: Form) -> bool:
    """Cheap sound filter: evaluate num at points on {form = 0}; a nonzero
    value proves the linear form does not divide the numerator."""
    pivot = next(i for i, c in enumerate(form) if c != 0)
    for seed in _PREFILTER_SEEDS:
        point = [rat(seed[i % len(seed)] + i) for i in range(num.nvars)]
        acc = RAT_ZERO
        for i, c in enumerate(form):
            if c and i != pivot:
                acc += c * point[i]
        point[pivot] = -acc / form[pivot]
        if num.eval(point) != 0:
            return False
    return True


def _cancel(num: Polynomial, den: dict) -> tuple[Polynomial, dict]:
    out = dict(den)
    for f in list(out):
        while out.get(f, 0) > 0:
            if len(out) > 0 and not _divisibility_possible(num, f):
                break
            q, ok = num.divmod_linear(f)
            if not ok:
                break
            num = q
            out[f] -= 1
            if out[f] == 0:
                del out[f]
    return num, out


def _factor_into_linears(p: Polynomial) -> tuple[Optional[dict], object]:
    """Write p as scalar * prod(canonical linear forms), if possible.

    Handles monomials and polynomials with linear factors; returns
    (None, 0) when a non-linear irreducible factor remains.
    """
    if p.is_zero():
        raise ZeroDivisionError("division by zero rational function")
    factors: dict = {}
    scalar = RAT_ONE
    while True:
        if p.is_constant():
            return factors, scalar * p.constant_value()
        if len(p.terms) == 1:
            (e, c), = p.terms.items()
            for i, k in enumerate(e):
                if k:
                    form = tuple(1 if j == i else 0 for j in range(p.nvars))
                    factors[form] = factors.get(form, 0) + k
            return factors, scalar * c
        if p.total_degree() == 1:
            coeffs = [RAT_ZERO] * p.nvars
            const = RAT_ZERO
            for e, c in p.terms.items():
                if sum(e) == 0:
                    const = c
                else:
                    coeffs[e.index(1)] = c
            if const != 0:
                return None, RAT_ZERO
            form, s = canon_linear(coeffs)
            factors[form] = factors.get(form, 0) + 1
            return factors, scalar * s
        progressed = False
        for f in _candidate_forms(p):
            q, ok = p.divmod_linear(f)
            if ok:
                factors[f] = factors.get(f, 0) + 1
                p = q
                progressed = True
                break
        if not progressed:
            return None, RAT_ZERO


def _candidate_forms(p: Polynomial):
    """Cheap candidate linear factors: single variables appearing in every term."""
    for i in range(p.nvars):
        if all(e[i] > 0 for e in p.terms):
            yield tuple(1 if j == i else 0 for j in range(p.nvars))


# -- module-level operation aliases matching the engine's vocabulary ---------


def substitute(f: RationalFunction, images: Sequence[Optional[Sequence]], target_nvars: int) -> RationalFunction:
    return f.substitute(images, target_nvars)


def reduce(f: RationalFunction) -> RationalFunction:
    return f.reduce()


def eval_at(f: RationalFunction, point: Sequence):
    return f.eval(point)


def rho_t_images(m: int, hbar_image: Optional[Sequence] = None) -> list:
    """Images of (a0..a{2m}, h) in lambda_space(m): a0 -> 0, ai -> li,
    a{2m+1-i} -> -li.  hbar_image is a linear form over lambda_space or
    None to kill h (only valid if h does not occur)."""
    images: list = [None]  # a0 -> 0
    zero = [RAT_ZERO] * m
    for i in range(1, m + 1):
        v = list(zero)
        v[i - 1] = RAT_ONE
        images.append(v)
    for i in range(m, 0, -1):
        v = list(zero)
        v[i - 1] = -RAT_ONE
        images.append(v)
    images.append(list(hbar_image) if hbar_image is not None else None)
    return images
