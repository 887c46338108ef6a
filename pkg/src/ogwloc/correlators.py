"""Constraint correlators of closed genus-zero theory by fixed-point recursion.

The correlator Z_a(h) for 0 <= a <= 2m is a truncated power series in Q and
eta_0..eta_{2m} whose coefficients are rational functions of the full torus
weights a0..a{2m} and h, with every denominator a product of linear forms.
The tuple (Z_0, ..., Z_{2m}) is the unique fixed point of a contracting map
built from three pieces:

  * the degree-zero part z0:  sum_n h^(1-n) (sum_j eta_j a_a^j)^n / n!,
  * a multi-leg sum over a stable contracted vertex carrying s >= 1 sphere
    legs and n constrained points (s + n + 1 >= 3), and
  * a single-edge sum where the output point rides a d-fold cover directly.

Each application of the map raises the known (Q, eta)-order by at least one,
so iteration from zero stabilizes after q_cap + sum(eta_caps) + 1 steps; we
iterate until two consecutive iterates agree, which doubles as the
fixed-point assertion.

Everything here stays over the full weight ring: specializing weights too
early makes individual summands singular.  The substitution h -> a_a/d and
the weight specialization are applied only to the assembled fixed point, in
correlator_at.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .algebra import Polynomial, RationalFunction, alpha_hbar_space, lambda_space, rho_t_images
from .cache import load_cached_series, store_series
from .errors import InvalidKey
from .rationals import RAT_ONE, factorial, rat
from .series import RFRing, Series, TruncationSpec


@dataclass(frozen=True)
class CorrelatorKey:
    m: int
    a: int
    q_cap: int
    eta_caps: tuple

    def __post_init__(self):
        if not (0 <= self.a <= 2 * self.m):
            raise InvalidKey(f"index a={self.a} outside 0..{2 * self.m}")
        if len(self.eta_caps) != 2 * self.m + 1:
            raise InvalidKey("eta_caps must have length 2m+1")

    @property
    def vars(self) -> tuple:
        return ("Q",) + tuple(f"e{j}" for j in range(2 * self.m + 1))

    @property
    def spec(self) -> TruncationSpec:
        return TruncationSpec((self.q_cap,) + tuple(self.eta_caps))


def _nvars(m: int) -> int:
    return 2 * m + 2


def _alpha(m: int, i: int) -> RationalFunction:
    return RationalFunction.variable(_nvars(m), i)


def _hbar_pow(m: int, k: int) -> RationalFunction:
    """h^k for any integer k (negative powers become denominator factors)."""
    n = _nvars(m)
    h_form = tuple(1 if i == n - 1 else 0 for i in range(n))
    if k >= 0:
        e = [0] * n
        e[n - 1] = k
        return RationalFunction(Polynomial(n, {tuple(e): RAT_ONE}))
    return RationalFunction(Polynomial.const(n, 1), {h_form: -k}, _reduced=True)


def _alpha_diff(m: int, i: int, j: int) -> RationalFunction:
    n = _nvars(m)
    return RationalFunction(Polynomial.from_linear(n, tuple(
        (1 if t == i else 0) - (1 if t == j else 0) for t in range(n)
    )))


@lru_cache(maxsize=None)
def _edge_factor(m: int, a: int, j: int, d: int) -> RationalFunction:
    """Multiple-cover factor of a degree-d sphere between fixed points a, j
    (without its Q^d)."""
    n = _nvars(m)
    forms = []
    diff = [0] * n
    diff[a], diff[j] = 1, -1
    forms.extend([tuple(diff)] * (2 * d))
    for w in range(d + 1):
        for k in range(2 * m + 1):
            if k in (a, j):
                continue
            coeffs = [rat(0)] * n
            coeffs[a] += rat(w, d)
            coeffs[j] += rat(d - w, d)
            coeffs[k] -= 1
            forms.append(coeffs)
    num = Polynomial.const(n, rat((-1) ** d * d ** (2 * d - 1), factorial(d) ** 2))
    return RationalFunction.from_num_den_forms(num, forms)


@lru_cache(maxsize=None)
def _vertex_weight_product(m: int, a: int) -> RationalFunction:
    """prod_{b != a} (a_b - a_a); an even number of factors, so equal to
    prod_{b != a} (a_a - a_b)."""
    out = RationalFunction.const(_nvars(m), 1)
    for b in range(2 * m + 1):
        if b != a:
            out = out * _alpha_diff(m, b, a)
    return out


def _eta_power(key: CorrelatorKey, n: int) -> Series:
    """(sum_j eta_j a_a^j)^n / n! truncated to the key's caps."""
    m, a = key.m, key.a
    ring = RFRing(_nvars(m))
    out: dict = {}
    caps = key.eta_caps
    slots = 2 * m + 1
    for combo in _compositions(n, slots, caps):
        denom = 1
        power = 0
        for j, c in enumerate(combo):
            denom *= factorial(c)
            power += j * c
        exp = (0,) + combo
        n_ = _nvars(m)
        e = [0] * n_
        e[a] = power
        out[exp] = RationalFunction(Polynomial(n_, {tuple(e): rat(1, denom)}))
    return Series(key.vars, key.spec, ring, out)


def _compositions(total: int, slots: int, caps) -> list:
    if slots == 1:
        return [(total,)] if total <= caps[0] else []
    out = []
    for first in range(min(total, caps[0]) + 1):
        for rest in _compositions(total - first, slots - 1, caps[1:]):
            out.append((first,) + rest)
    return out


def z0(key: CorrelatorKey) -> Series:
    """Degree-zero correlator: sum_n h^(1-n) (sum eta_j a_a^j)^n / n!."""
    ring = RFRing(_nvars(key.m))
    out = Series.zero(key.vars, key.spec, ring)
    for n in range(sum(key.eta_caps) + 1):
        part = _eta_power(key, n)
        if part.is_zero():
            continue
        out = out + part.coeff_mul(_hbar_pow(key.m, 1 - n))
    return out


def _substitute_hbar(series: Series, m: int, coeffs_alpha) -> Series:
    """h -> the given linear form in the alpha variables, coefficient-wise."""
    n = _nvars(m)
    images = []
    for i in range(n - 1):
        unit = [0] * n
        unit[i] = 1
        images.append(unit)
    h_image = [rat(c) for c in coeffs_alpha] + [rat(0)]
    images.append(h_image)
    return series.map_coefficients(lambda rf: rf.substitute(images, n))


def recursion_step(current: tuple, m: int) -> tuple:
    """One application of the contracting map to a (2m+1)-tuple of series."""
    spec = current[0].spec
    vars_ = current[0].vars
    ring = current[0].ring
    q_cap = spec.caps[0]
    eta_total = sum(spec.caps[1:])
    n_ = _nvars(m)

    sub_cache: dict = {}

    def z_sub(j: int, d: int, a: int) -> Series:
        key = (j, d, a)
        if key not in sub_cache:
            coeffs = [rat(0)] * (n_ - 1)
            coeffs[j] += rat(1, d)
            coeffs[a] -= rat(1, d)
            sub_cache[key] = _substitute_hbar(current[j], m, coeffs)
        return sub_cache[key]

    leg_types = [(j, d) for j in range(2 * m + 1) for d in range(1, q_cap + 1)]

    out = []
    for a in range(2 * m + 1):
        key = CorrelatorKey(m, a, q_cap, tuple(spec.caps[1:]))
        total = z0(key)
        my_legs = [(j, d) for (j, d) in leg_types if j != a]

        # single-edge sum
        for j, d in my_legs:
            shift_coeffs = [rat(0)] * n_
            shift_coeffs[a] += rat(1, d)
            shift_coeffs[j] -= rat(1, d)
            shift_coeffs[n_ - 1] = rat(1)
            pole = RationalFunction.from_num_den_forms(Polynomial.const(n_, 1), [shift_coeffs])
            scalar = _vertex_weight_product(m, a) * pole * _edge_factor(m, a, j, d)
            q_shift = (d,) + (0,) * (len(vars_) - 1)
            term = z_sub(j, d, a).coeff_mul(scalar)
            total = total + Series(vars_, spec, ring, {
                tuple(x + y for x, y in zip(e, q_shift)): c for e, c in term.coeffs.items()
                if spec.admits(tuple(x + y for x, y in zip(e, q_shift)))
            })

        # multi-leg sum over a stable contracted vertex (s >= 1, s + n >= 2)
        hinv = _hbar_pow(m, -1)
        eta_powers = [_eta_power(key, n) for n in range(eta_total + 1)]
        for s in range(1, q_cap + 1):
            for legs in itertools.combinations_with_replacement(my_legs, s):
                q_used = sum(d for _, d in legs)
                if q_used > q_cap:
                    continue
                mult_weight = RAT_ONE
                for _, grp in itertools.groupby(legs):
                    mult_weight /= factorial(len(tuple(grp)))
                flag_prod = RationalFunction.const(n_, 1)
                r_sum = RationalFunction.zero(n_)
                legs_series = None
                for j, d in legs:
                    inv_diff = RationalFunction(Polynomial.const(n_, rat(d)),
                                                ) / _alpha_diff(m, a, j)
                    flag_prod = flag_prod * inv_diff
                    r_sum = r_sum + inv_diff
                    piece = z_sub(j, d, a).coeff_mul(_edge_factor(m, a, j, d))
                    q_shift = (d,) + (0,) * (len(vars_) - 1)
                    piece = Series(vars_, spec, ring, {
                        tuple(x + y for x, y in zip(e, q_shift)): c for e, c in piece.coeffs.items()
                        if spec.admits(tuple(x + y for x, y in zip(e, q_shift)))
                    })
                    legs_series = piece if legs_series is None else legs_series * piece
                if legs_series is None or legs_series.is_zero():
                    continue
                weight_pow = _vertex_weight_product(m, a) ** s
                for n in range(eta_total + 1):
                    if s + n < 2:
                        continue
                    if eta_powers[n].is_zero():
                        continue
                    coupling = (r_sum + hinv) ** (s + n - 2)
                    scalar = (weight_pow * hinv * flag_prod * coupling).scale(mult_weight)
                    total = total + (eta_powers[n] * legs_series).coeff_mul(scalar)
        out.append(total)
    return tuple(out)


def _compute_fixed_point(m: int, q_cap: int, eta_caps: tuple) -> tuple:
    key0 = CorrelatorKey(m, 0, q_cap, eta_caps)
    ring = RFRing(_nvars(m))
    zero = Series.zero(key0.vars, key0.spec, ring)
    current = tuple(zero for _ in range(2 * m + 1))
    max_steps = q_cap + sum(eta_caps) + 2
    for _ in range(max_steps):
        nxt = recursion_step(current, m)
        if all(x == y for x, y in zip(nxt, current)):
            return current
        current = nxt
    raise AssertionError(
        f"correlator iteration did not stabilize within {max_steps} steps "
        f"(m={m}, q_cap={q_cap}, eta_caps={eta_caps})"
    )


_MEM: dict = {}


def correlator_tuple(m: int, q_cap: int, eta_caps: tuple) -> tuple:
    """The fixed point (Z_0, ..., Z_{2m}) at the given truncation, cached
    in memory and on disk."""
    eta_caps = tuple(eta_caps)
    mem_key = (m, q_cap, eta_caps)
    if mem_key in _MEM:
        return _MEM[mem_key]
    loaded = []
    for a in range(2 * m + 1):
        key = CorrelatorKey(m, a, q_cap, eta_caps)
        s = load_cached_series(key, RFRing(_nvars(m)))
        if s is None:
            loaded = None
            break
        loaded.append(s)
    if loaded is not None:
        result = tuple(loaded)
    else:
        result = _compute_fixed_point(m, q_cap, eta_caps)
        for a in range(2 * m + 1):
            store_series(CorrelatorKey(m, a, q_cap, eta_caps), result[a])
    _MEM[mem_key] = result
    return result


def correlator(key: CorrelatorKey) -> Series:
    """Fixed-point correlator Z_a at the key's truncation."""
    return correlator_tuple(key.m, key.q_cap, key.eta_caps)[key.a]


def correlator_at(m: int, a: int, d, q_cap: int, eta_caps: tuple) -> Series:
    """Z_a at h = a_a/d, with weights specialized to the residual torus.

    d is a positive rational with denominator 1 or 2.  The result is a
    series over rational functions of l1..lm; any denominator that dies
    under the specialization raises SubstitutionSingular (a hard failure).
    """
    d = rat(d)
    if a == 0 or d <= 0 or int(d.denominator) not in (1, 2):
        raise InvalidKey(f"correlator_at needs a != 0 and d = p/1 or p/2, got a={a}, d={d}")
    n_ = _nvars(m)
    series = correlator(CorrelatorKey(m, a, q_cap, tuple(eta_caps)))
    # h -> (1/d) a_a over the full weights, then the weight specialization
    coeffs = [rat(0)] * (n_ - 1)
    coeffs[a] = 1 / d
    series = _substitute_hbar(series, m, coeffs)
    images = rho_t_images(m)
    target = len(lambda_space(m))
    return series.map_coefficients(lambda rf: rf.substitute(images, target), RFRing(target))


def alpha_hbar_vars(m: int) -> tuple:
    return alpha_hbar_space(m)
