"""Genus-zero open descendent integrals of discs and their generating values.

bracket(a_list, k) is the integer intersection number with interior
cotangent-power insertions a_list and k boundary point insertions.  It is
nonzero only on-dimension, 2*sum(a) == 2*len(a) + k - 3, and is computed
from two relations: the closed form for all-positive insertions,

    (1 + sum(2a_i - 1))! / prod((2a_i - 1)!!),

and the string equation, which removes one zero insertion and sums over
lowering each remaining positive index.  The two stable seeds that the
string equation cannot reach are <tau_0 sigma> = 1 and <sigma^3> = 1 (the
latter is also the empty case of the closed form).

f0_coeff gives the matching disc free-energy extraction
F[t_{b_1}..t_{b_s} t_0^n s_0^k] = 2^((k-1)/2) * bracket(b + [0]*n, k).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

from .rationals import double_factorial, factorial


def in_dimension(a_list: Sequence[int], k: int) -> bool:
    return 2 * sum(a_list) == 2 * len(a_list) + k - 3


@lru_cache(maxsize=None)
def _bracket(a_sorted: tuple, k: int) -> int:
    if not in_dimension(a_sorted, k):
        return 0
    if a_sorted == (0,) and k == 1:
        return 1
    if all(a >= 1 for a in a_sorted):
        num = factorial(1 + sum(2 * a - 1 for a in a_sorted))
        den = 1
        for a in a_sorted:
            den *= double_factorial(2 * a - 1)
        assert num % den == 0
        return num // den
    # string equation: drop one tau_0, lower each remaining positive index
    rest = list(a_sorted)
    rest.remove(0)
    total = 0
    for j, a in enumerate(rest):
        if a >= 1:
            lowered = rest[:j] + [a - 1] + rest[j + 1 :]
            total += _bracket(tuple(sorted(lowered)), k)
    return total


def bracket(a_list: Iterable[int], k: int) -> int:
    """Open descendent integral; 0 off-dimension."""
    a = tuple(sorted(a_list))
    if any(x < 0 for x in a) or k < 0:
        raise ValueError("insertions must be non-negative")
    return _bracket(a, k)


def f0_coeff(b_list: Iterable[int], n_tau0: int, k: int) -> int:
    """Free-energy extraction with n_tau0 extra zero insertions; 0 for even k."""
    if k <= 0 or k % 2 == 0:
        return 0
    a = tuple(sorted(tuple(b_list) + (0,) * n_tau0))
    return 2 ** ((k - 1) // 2) * _bracket(a, k)


def table(max_sum_a: int, max_len: int, max_k: int) -> dict:
    """All nonzero bracket values with sum(a) <= max_sum_a, len(a) <= max_len,
    k <= max_k, keyed by (a_tuple, k)."""
    out = {}

    def rec(prefix: tuple, remaining: int, min_next: int):
        for k in range(max_k + 1):
            if in_dimension(prefix, k):
                v = bracket(prefix, k)
                if v:
                    out[(prefix, k)] = v
        if len(prefix) < max_len:
            for a in range(min_next, remaining + 1):
                rec(prefix + (a,), remaining - a, a)

    rec((), max_sum_a, 0)
    return out
