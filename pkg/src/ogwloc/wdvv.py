"""Independent cross-check counts: Kontsevich numbers and Welschinger counts.

kontsevich_nd implements the classical WDVV recursion for the genus-zero
degree-d counts N_d of plane rational curves.

wdvv_welschinger returns the Welschinger number W(k, l): the signed count
of degree d = (k+2l+1)/3 real rational plane curves through k real points
and l conjugate pairs.  Two sources are combined, both independent of the
localization engine:

  * l = 0 (all real): a floor-diagram count.  A degree-d diagram is a
    tree on d ordered floors whose edges (bounded elevators) carry
    positive weights, with weight-one unbounded down-elevators giving
    every floor divergence one; a marking assigns the 3d-1 ordered point
    constraints bijectively to floors and elevators compatibly with the
    order.  Multiplicities per bounded elevator of weight w: w^2 for the
    complex count (floor_diagram_nd, validated against kontsevich_nd for
    d <= 6) and, for the real count, 1 if w is odd and 0 if w is even
    (validated against the classical values 1, 1, 8, 240, 18264 and the
    degree-6 headline 2,845,440).

  * l >= 1: the classical table of pair-constrained Welschinger numbers
    of the plane through degree 4, which covers every valid key with
    k + 2l <= 11.  Pair keys of degree >= 5 are outside this oracle's
    validated range and raise.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .errors import InvalidKey
from .rationals import binomial


@lru_cache(maxsize=None)
def kontsevich_nd(d: int) -> int:
    """Plane rational curve count N_d via the closed WDVV recursion."""
    if d < 1:
        raise InvalidKey("degree must be positive")
    if d == 1:
        return 1
    total = 0
    for d1 in range(1, d):
        d2 = d - d1
        total += (
            kontsevich_nd(d1)
            * kontsevich_nd(d2)
            * (
                d1 * d1 * d2 * d2 * binomial(3 * d - 4, 3 * d1 - 2)
                - d1 ** 3 * d2 * binomial(3 * d - 4, 3 * d1 - 1)
            )
        )
    return total


# ---------------------------------------------------------------------------
# floor diagrams
# ---------------------------------------------------------------------------


def _all_trees(n: int) -> list:
    """Edge lists of all labeled trees on n ordered vertices."""
    if n == 1:
        return [[]]
    if n == 2:
        return [[(0, 1)]]
    import heapq

    out = []
    for seq in itertools.product(range(n), repeat=n - 2):
        degree = [1] * n
        for v in seq:
            degree[v] += 1
        edges = []
        degs = list(degree)
        leaves = [i for i in range(n) if degs[i] == 1]
        heapq.heapify(leaves)
        for v in seq:
            leaf = heapq.heappop(leaves)
            edges.append((min(leaf, v), max(leaf, v)))
            degs[v] -= 1
            if degs[v] == 1:
                heapq.heappush(leaves, v)
        u, w = heapq.heappop(leaves), heapq.heappop(leaves)
        edges.append((min(u, w), max(u, w)))
        out.append(edges)
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _floor_diagrams(d: int) -> tuple:
    """All degree-d genus-0 floor diagrams as (edges, downs): edges a
    weighted tree ((i, j, w), ...) on floors 0..d-1 with i < j, downs[i]
    the number of weight-one down ends at floor i.

    For a fixed tree the edge weights are the flows induced by the down
    distribution: every floor sources one unit which drains through the
    downs, so the weight on (i, j) is the net demand of the component
    above the edge.
    """
    out = set()
    for tree in _all_trees(d):
        for downs in _compositions(d, d):
            # w(e) for e=(i,j): sum over the component containing j (with
            # e removed) of (1 - downs[f]); must be >= 1
            adj = {f: [] for f in range(d)}
            for (i, j) in tree:
                adj[i].append(j)
                adj[j].append(i)

            def component_sum(root: int, banned: int) -> int:
                total, stack, seen = 0, [root], {banned, root}
                while stack:
                    f = stack.pop()
                    total += 1 - downs[f]
                    for g in adj[f]:
                        if g not in seen:
                            seen.add(g)
                            stack.append(g)
                return total

            weights = []
            ok = True
            for (i, j) in tree:
                w = component_sum(j, i)
                if w < 1:
                    ok = False
                    break
                weights.append(w)
            if ok:
                edges = tuple((i, j, w) for (i, j), w in zip(tree, weights))
                out.add((edges, tuple(downs)))
    return tuple(sorted(out))


def _count_markings(d: int, edges, downs) -> int:
    """Number of order-compatible bijective markings of one diagram."""
    n_edges = len(edges)
    full = (1 << n_edges) - 1

    @lru_cache(maxsize=None)
    def rec(t: int, mask: int, dl: tuple) -> int:
        if t == d and mask == full and all(v == 0 for v in dl):
            return 1
        total = 0
        for s in range(t, d):
            if dl[s] > 0:
                nd = list(dl)
                nd[s] -= 1
                total += rec(t, mask, tuple(nd))
        for idx, (i, j, w) in enumerate(edges):
            if not (mask >> idx) & 1 and i < t and j >= t:
                total += rec(t, mask | (1 << idx), dl)
        if (
            t < d
            and dl[t] == 0
            and all((mask >> idx) & 1 for idx, (i, j, w) in enumerate(edges) if j == t)
        ):
            total += rec(t + 1, mask, dl)
        return total

    result = rec(0, 0, tuple(downs))
    rec.cache_clear()
    return result


def floor_diagram_nd(d: int) -> int:
    """Complex count via floor diagrams; equals kontsevich_nd(d)."""
    total = 0
    for edges, downs in _floor_diagrams(d):
        mu = 1
        for _, _, w in edges:
            mu *= w * w
        total += mu * _count_markings(d, edges, downs)
    return total


def _floor_diagram_welschinger(d: int) -> int:
    total = 0
    for edges, downs in _floor_diagrams(d):
        if any(w % 2 == 0 for _, _, w in edges):
            continue
        total += _count_markings(d, edges, downs)
    return total


# Classical pair-constrained Welschinger numbers of the plane, degree <= 4,
# indexed by (degree, pairs).
_PAIR_TABLE = {
    (1, 0): 1,
    (2, 0): 1, (2, 1): 1, (2, 2): 1,
    (3, 0): 8, (3, 1): 6, (3, 2): 4, (3, 3): 2,
    (4, 0): 240, (4, 1): 144, (4, 2): 80, (4, 3): 40, (4, 4): 16, (4, 5): 0,
}


def wdvv_welschinger(k: int, l: int) -> int:
    """Welschinger count through k real points and l conjugate pairs."""
    if k < 1:
        raise InvalidKey("needs at least one real point")
    if (k + 2 * l) % 3 != 2:
        raise InvalidKey(f"k + 2l = {k + 2 * l} is not 2 mod 3")
    d = (k + 2 * l + 1) // 3
    if l == 0:
        return _floor_diagram_welschinger(d)
    if (d, l) in _PAIR_TABLE:
        return _PAIR_TABLE[(d, l)]
    raise InvalidKey(
        f"pair-constrained oracle values are tabulated only through degree 4 "
        f"(requested degree {d} with {l} pairs)"
    )


def welschinger_table(max_sum: int) -> dict:
    """All oracle values with k + 2l <= max_sum, keyed by (k, l)."""
    out = {}
    for s in range(2, max_sum + 1):
        if s % 3 != 2:
            continue
        for l in range(0, s // 2 + 1):
            k = s - 2 * l
            if k < 1:
                continue
            try:
                out[(k, l)] = wdvv_welschinger(k, l)
            except InvalidKey:
                continue
    return out
