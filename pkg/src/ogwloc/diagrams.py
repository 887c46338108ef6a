"""Diagrammatic route: the invariant as a connected tree-diagram sum.

The generating-function identity expresses the invariants through an
operator product whose expansion is a sum over tree diagrams with four
vertex types: disc vertices carrying boundary points (I), sphere-cover
leaves with a descendent slot (II), odd intersection-disc vertices (III),
and correlator insertions (IV, folded here into the II/III vertex that
consumes them).  Every connected tree diagram is linear in the auxiliary
counting variable, so the logarithm/derivative extraction amounts to
summing connected trees.

Each type-III vertex contributes a phase i^(1+m); the total phase divided
by i^((m+1) w1(beta)) is real because the number of type-III vertices has
the parity of beta.  Phases are tracked exactly as powers of i with
GaussianScalar bucketing, and the imaginary part is asserted to vanish.

Diagrams are enumerated over distinguished vertex sets with bipartite
trees from Pruefer sequences; dividing by n_I! n_III! and the multiset
multiplicities of identical sphere leaves realizes the sum over
isomorphism classes weighted by 1/|Aut|.  This is deliberately different
machinery from the profile route's canonical rooted catalogs, so the two
routes cross-check each other's combinatorics as well as their formulas.
"""

from __future__ import annotations

import itertools
from math import comb, factorial
from typing import Iterator

from .descendents import f0_coeff
from .errors import InvalidKey
from .profiles import InvariantKey, _all_trees, _leg_factor, _odd_factor
from .rationals import GaussianScalar, rat


def _sub(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def _cv_options(blv: tuple) -> list:
    return [tuple(c) for c in itertools.product(*[range(x + 1) for x in blv])]


def _iii_decorations(m: int, bb: int, blv: tuple) -> list:
    """(a, d, dt, cv) for an odd disc vertex; cost (d + 2 dt, cv)."""
    out = []
    for d in range(1, bb + 1, 2):
        for dt in range(0, (bb - d) // 2 + 1):
            for cv in _cv_options(blv):
                for a in range(1, 2 * m + 1):
                    out.append(((a, d, dt, cv), d + 2 * dt, cv))
    return out


def _ii_types(m: int, bb: int, blv: tuple) -> list:
    """(a, d, dt, cv) for a sphere leaf; cost (2(d+dt), cv)."""
    out = []
    for d in range(1, bb // 2 + 1):
        for dt in range(0, (bb - 2 * d) // 2 + 1):
            for cv in _cv_options(blv):
                for a in range(1, 2 * m + 1):
                    out.append(((a, d, dt, cv), 2 * (d + dt), cv))
    return out


def _ii_multisets(types: list, bb: int, blv: tuple) -> Iterator[tuple]:
    def rec(start: int, b_left: int, lv_left: tuple, acc: tuple):
        yield acc, bb - b_left, _sub(blv, lv_left)
        for i in range(start, len(types)):
            t, cb, clv = types[i]
            if cb > b_left or any(c > r for c, r in zip(clv, lv_left)):
                continue
            yield from rec(i, b_left - cb, _sub(lv_left, clv), acc + (t,))

    yield from rec(0, bb, blv, ())


def _i_vertex_value(field, m: int, khat: int, l0: int, iis: tuple, n_b: int, q_cap, eta_caps):
    """Type-I factor: Lambda^(khat-1)/khat!/l0! times the descendent sum
    over the sphere-leaf slots, with plain-coefficient tails."""
    big_k = khat + n_b
    s = len(iis)
    if big_k % 2 == 0 or 2 * (l0 + s) + big_k < 3:
        return field.zero()
    b_total = l0 + s + (big_k - 3) // 2
    if b_total < 0 or (s == 0 and b_total != 0):
        return field.zero()
    lam = field.lam_prod()
    vertex = lam ** (khat - 1) if khat >= 1 else field.from_rat(1) / lam
    vertex = vertex * field.from_rat(rat(1, factorial(khat) * factorial(l0)))
    total = field.zero()
    for b in _compositions(b_total, s):
        coeff = f0_coeff(b, l0, big_k)
        if coeff == 0:
            continue
        term = field.from_rat(coeff)
        for (a, d, dt, cv), bj in zip(iis, b):
            term = term * (-(field.from_rat(d) / field.alpha(a))) ** (bj + 1)
            term = term * _leg_factor(field, m, d, a)
            term = term * _plain_tail(field, a, rat(d), dt, cv, q_cap, eta_caps)
            if term.is_zero():
                break
        total = total + term
    return vertex * total


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _plain_tail(field, a: int, d, dt: int, cv: tuple, q_cap: int, eta_caps: tuple):
    scale = 1
    for c in cv:
        scale *= factorial(c)
    return field.tail(a, d, dt, cv, q_cap, eta_caps) / field.from_rat(scale)


def _iii_vertex_value(field, m: int, a: int, d: int, dt: int, cv: tuple, n_b: int, q_cap, eta_caps):
    """Type-III factor without its phase: the odd-disc Euler factor, one
    propagator -(d/2) Lambda/alpha_a per incident edge, and the plain tail
    at the half-integer cover parameter."""
    lam = field.lam_prod()
    value = _odd_factor(field, m, d, a)
    value = value * ((-(lam / field.alpha(a))) * field.from_rat(rat(d, 2))) ** n_b
    value = value * _plain_tail(field, a, rat(d, 2), dt, cv, q_cap, eta_caps)
    return value


def diagram_sum(key: InvariantKey, field):
    """The invariant's raw fixed-point total via the tree-diagram sum
    (the same normalization as the profile routes is applied by ogw)."""
    m, k, lvec, beta = key.m, key.k, key.lvec, key.beta
    q_cap, eta_caps = key.q_cap, key.lvec
    real_bucket = field.zero()
    imag_bucket = field.zero()

    def add(value, n_iii: int):
        nonlocal real_bucket, imag_bucket
        e = ((1 + m) * n_iii - (m + 1) * (beta % 2)) % 4
        phase = GaussianScalar.i_power(e)
        if phase.im == 0:
            real_bucket = real_bucket + _scale(field, value, phase.re)
        else:
            imag_bucket = imag_bucket + _scale(field, value, phase.im)

    lone_scale = rat(factorial(k))
    for d in range(2 * m + 1):
        lone_scale *= factorial(lvec[d])

    for n_iii in range(beta % 2, beta + 1, 2):
        iii_space = _iii_decorations(m, beta, lvec)
        # each disc vertex needs khat + incident edges odd and the ghost
        # stability bound, so 3 n_i <= k + (n-1) + 2 (sum lvec + beta/2)
        max_ni = (k + n_iii - 1 + 2 * sum(lvec) + beta) // 2 + 1
        for n_i in range(0, max_ni + 1):
            n = n_iii + n_i
            if n == 0:
                continue
            if n_i == 0 and (n_iii != 1 or k != 0):
                continue
            if n_iii == 0 and n_i != 1:
                continue
            for edges in _all_trees(n):
                # vertices 0..n_iii-1 are type III, the rest type I
                if any((u < n_iii) == (v < n_iii) for u, v in edges):
                    continue
                deg = [0] * n
                for u, v in edges:
                    deg[u] += 1
                    deg[v] += 1
                for value, used in _decorated_values(
                    key, field, n_iii, n_i, deg, iii_space, q_cap, eta_caps
                ):
                    weight = rat(1, factorial(n_iii) * factorial(n_i))
                    add(_scale(field, value, weight * lone_scale), n_iii)

    # reality: the imaginary bucket must vanish exactly
    assert imag_bucket.is_zero(), "diagram sum has a nonzero imaginary part"
    return real_bucket


def _scale(field, value, q):
    from .fields import GradedEvalField, GradedValue

    if isinstance(field, GradedEvalField):
        if value.is_zero() or q == 0:
            return field.zero()
        return GradedValue(value.val * rat(q), value.deg)
    return value.scale(rat(q))


def _decorated_values(key, field, n_iii, n_i, deg, iii_space, q_cap, eta_caps):
    """Yield (product of vertex factors, budgets) over decorations of the
    distinguished vertices of one tree."""
    m, k, lvec, beta = key.m, key.k, key.lvec, key.beta

    def rec_iii(idx: int, b_left: int, lv_left: tuple, acc):
        if idx == n_iii:
            yield acc, b_left, lv_left
            return
        for (a, d, dt, cv), cb, clv in iii_space:
            if cb > b_left or any(c > r for c, r in zip(clv, lv_left)):
                continue
            v = _iii_vertex_value(field, m, a, d, dt, cv, deg[idx], q_cap, eta_caps)
            if v.is_zero():
                continue
            yield from rec_iii(idx + 1, b_left - cb, _sub(lv_left, clv), acc * v)

    def rec_i(idx: int, b_left: int, k_left: int, lv_left: tuple, acc):
        if idx == n_i:
            if b_left == 0 and k_left == 0 and all(v == 0 for v in lv_left):
                yield acc
            return
        vertex = n_iii + idx
        ii_space = _ii_types(m, b_left, lv_left)
        for iis, cb, clv in _ii_multisets(ii_space, b_left, lv_left):
            lv1 = _sub(lv_left, clv)
            mult = rat(1)
            for _, grp in itertools.groupby(iis):
                mult /= factorial(len(tuple(grp)))
            for l0 in range(0, lv1[0] + 1):
                lv2 = (lv1[0] - l0,) + lv1[1:]
                for khat in range(0, k_left + 1):
                    v = _i_vertex_value(field, m, khat, l0, iis, deg[vertex], q_cap, eta_caps)
                    if v.is_zero():
                        continue
                    yield from rec_i(
                        idx + 1,
                        b_left - cb,
                        k_left - khat,
                        lv2,
                        acc * _scale(field, v, mult),
                    )

    one = field.from_rat(1)
    for acc3, b_left, lv_left in rec_iii(0, beta, lvec, one):
        yield from ((v, None) for v in rec_i(0, b_left, k, lv_left, acc3))
