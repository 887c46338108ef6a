"""Fixed-point profiles: decorated odd-even trees and their contributions.

A profile is a bipartite tree whose edges join odd-degree disc vertices to
even-degree (ghost) disc vertices, decorated with:

  odd vertex   (beta0, a, dt, cv): an odd intersection-disc degree beta0,
               the non-real fixed point index a in 1..2m, a sphere tail of
               degree dt, and the tail's constraint counts cv (cv[j] points
               carrying the j-th power constraint);
  even vertex  (khat, l0, legs): khat original boundary points, l0 interior
               points on the ghost disc (degree-0 constraints only; higher
               constraints on a ghost disc kill the contribution, so they
               are never enumerated), and a multiset of sphere legs;
  leg          (d, a, dt, cv): a d-fold cover sphere to fixed point a with
               its own tail.

Interior and boundary marked points enter as counts; the sum over actual
label assignments is restored by multinomial factors.  enumerate_orbits
streams one canonical representative per isomorphism class together with
the order of its automorphism group (permuting edges and legs);
enumerate_labeled independently streams every distinct labeled profile for
small keys, each carrying weight 1/(r! * prod(s_i!)).

contribution() evaluates the closed-form fixed-point weight of a profile:
a global sign, a descendent-integral factor per even vertex, a
multiple-cover factor per leg, a disc factor per odd vertex, and a
correlator-coefficient factor per sphere tail.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, factorial
from typing import Iterator, Optional

from .descendents import f0_coeff
from .errors import InvalidKey
from .rationals import rat


@dataclass(frozen=True)
class InvariantKey:
    m: int
    k: int
    lvec: tuple
    beta: int

    def __post_init__(self):
        if self.m < 1 or self.k < 0 or self.beta < 0 or any(x < 0 for x in self.lvec):
            raise InvalidKey("negative entries")
        if len(self.lvec) != 2 * self.m + 1:
            raise InvalidKey(f"lvec must have length {2 * self.m + 1}")
        if self.k + 2 * sum(self.lvec) + 3 * self.beta < 3:
            raise InvalidKey("unstable key")
        if (self.k + self.beta) % 2 != 1:
            raise InvalidKey("orientability requires k + beta odd")

    @property
    def q_cap(self) -> int:
        return max(0, (self.beta - 1) // 2)


@dataclass(frozen=True)
class Profile:
    """Canonical count-based profile: vertex data with tree degrees."""

    m: int
    odd: tuple  # ((beta0, a, dt, cv, degree), ...)
    even: tuple  # ((khat, l0, legs, heads), ...)
    edges: tuple  # ((odd_index, even_index), ...)

    @property
    def n_odd(self) -> int:
        return len(self.odd)


# ---------------------------------------------------------------------------
# enumeration of isomorphism classes
# ---------------------------------------------------------------------------


def _sub_lv(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def _add_lv(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


class _ShapeEnumerator:
    def __init__(self, key: InvariantKey):
        self.key = key
        self.m = key.m
        self.zero_lv = (0,) * (2 * self.m + 1)
        self._odd_cat: dict = {}
        self._even_cat: dict = {}

    # -- small pieces ------------------------------------------------------
    def _cv_options(self, blv: tuple) -> list:
        ranges = [range(c + 1) for c in blv]
        return [tuple(c) for c in itertools.product(*ranges)]

    def _leg_types(self, bb: int, blv: tuple) -> list:
        out = []
        for d in range(1, bb // 2 + 1):
            for dt in range(0, (bb - 2 * d) // 2 + 1):
                for a in range(1, 2 * self.m + 1):
                    for cv in self._cv_options(blv):
                        out.append(((d, a, dt, cv), 2 * (d + dt), cv))
        return out

    def _leg_multisets(self, bb: int, blv: tuple) -> list:
        """All sorted leg tuples with total degree cost <= bb, counts <= blv."""
        types = self._leg_types(bb, blv)
        out = []

        def rec(start: int, bb_left: int, blv_left: tuple, acc: tuple):
            out.append((acc, bb - bb_left, _sub_lv(blv, blv_left)))
            for i in range(start, len(types)):
                leg, cost_b, cost_lv = types[i]
                if cost_b > bb_left or any(c > r for c, r in zip(cost_lv, blv_left)):
                    continue
                rec(i, bb_left - cost_b, _sub_lv(blv_left, cost_lv), acc + (leg,))

        rec(0, bb, blv, ())
        return out

    # -- catalogs of rooted subtrees ------------------------------------------
    def odd_subtrees(self, bb: int, bk: int, blv: tuple) -> list:
        """Rooted odd subtrees (root odd vertex has a parent edge)."""
        mkey = (bb, bk, blv)
        if mkey in self._odd_cat:
            return self._odd_cat[mkey]
        out = []
        for beta0 in range(1, bb + 1, 2):
            for dt in range(0, (bb - beta0) // 2 + 1):
                used_b = beta0 + 2 * dt
                for a in range(1, 2 * self.m + 1):
                    for cv in self._cv_options(blv):
                        blv_left = _sub_lv(blv, cv)
                        for children, cost in self._even_multisets(bb - used_b, bk, blv_left):
                            cb, ck, clv = cost
                            node = ("O", beta0, a, dt, cv, children)
                            out.append((node, (used_b + cb, ck, _add_lv(cv, clv))))
        self._odd_cat[mkey] = out
        return out

    def _even_multisets(self, bb: int, bk: int, blv: tuple) -> list:
        cat = self.even_subtrees(bb, bk, blv, True)
        out = []

        def rec(start: int, b_left: int, k_left: int, lv_left: tuple, acc: tuple):
            out.append((acc, (bb - b_left, bk - k_left, _sub_lv(blv, lv_left))))
            for i in range(start, len(cat)):
                node, (cb, ck, clv) = cat[i]
                if cb > b_left or ck > k_left or any(c > r for c, r in zip(clv, lv_left)):
                    continue
                rec(i, b_left - cb, k_left - ck, _sub_lv(lv_left, clv), acc + (node,))

        rec(0, bb, bk, blv, ())
        return out

    def _odd_multisets(self, bb: int, bk: int, blv: tuple) -> list:
        cat = self.odd_subtrees(bb, bk, blv)
        out = []

        def rec(start: int, b_left: int, k_left: int, lv_left: tuple, acc: tuple):
            out.append((acc, (bb - b_left, bk - k_left, _sub_lv(blv, lv_left))))
            for i in range(start, len(cat)):
                node, (cb, ck, clv) = cat[i]
                if cb > b_left or ck > k_left or any(c > r for c, r in zip(clv, lv_left)):
                    continue
                rec(i, b_left - cb, k_left - ck, _sub_lv(lv_left, clv), acc + (node,))

        rec(0, bb, bk, blv, ())
        return out

    def even_subtrees(self, bb: int, bk: int, blv: tuple, has_parent: bool) -> list:
        mkey = (bb, bk, blv, has_parent)
        if mkey in self._even_cat:
            return self._even_cat[mkey]
        out = []
        for children, (cb1, ck1, clv1) in self._odd_multisets(bb, bk, blv):
            blv1 = _sub_lv(blv, clv1)
            for legs, cb2, clv2 in self._leg_multisets(bb - cb1, blv1):
                blv2 = _sub_lv(blv1, clv2)
                s = len(legs)
                heads = len(children) + (1 if has_parent else 0)
                for l0 in range(0, blv2[0] + 1):
                    for khat in range(0, bk - ck1 + 1):
                        if not _even_vertex_ok(khat, l0, s, heads):
                            continue
                        node = ("E", khat, l0, legs, children)
                        lv_used = _add_lv(clv1, clv2)
                        lv_used = _add_lv(lv_used, (l0,) + self.zero_lv[1:])
                        out.append((node, (cb1 + cb2, ck1 + khat, lv_used)))
        self._even_cat[mkey] = out
        return out


def _even_vertex_ok(khat: int, l0: int, s: int, heads: int) -> bool:
    big_k = khat + heads
    if big_k % 2 == 0:  # per-vertex orientability
        return False
    if 2 * (l0 + s) + big_k < 3:  # ghost disc stability
        return False
    if s == 0 and (2 * l0 + big_k - 3) != 0:  # empty descendent sum
        return False
    return True


# -- explicit graph form, canonical encoding, automorphisms ------------------


def _build_graph(root) -> tuple:
    """Flatten a nested rooted node into (verts, adj).  verts[i] is an
    ("O"|"E", payload) pair where payload omits children."""
    verts: list = []
    adj: list = []

    def visit(node, parent: Optional[int]) -> int:
        idx = len(verts)
        if node[0] == "O":
            if len(node) == 6:
                _, beta0, a, dt, cv, children = node
                verts.append(("O", (beta0, a, dt, cv)))
            else:  # skeleton node: fixed-point index summed out
                _, beta0, dt, cv, children = node
                verts.append(("O", (beta0, dt, cv)))
        elif len(node) == 5:
            _, khat, l0, legs, children = node
            verts.append(("E", (khat, l0, legs)))
        else:  # skeleton node: no khat decoration
            _, l0, legs, children = node
            verts.append(("E", (l0, legs)))
        adj.append([])
        if parent is not None:
            adj[idx].append(parent)
            adj[parent].append(idx)
        for ch in children:
            visit(ch, idx)
        return idx

    visit(root, None)
    return verts, adj


def _tree_center(adj: list) -> list:
    n = len(adj)
    if n == 1:
        return [0]
    degree = [len(a) for a in adj]
    leaves = [i for i in range(n) if degree[i] == 1]
    removed = 0
    while n - removed > 2:
        nxt = []
        for leaf in leaves:
            removed += 1
            for nb in adj[leaf]:
                degree[nb] -= 1
                if degree[nb] == 1:
                    nxt.append(nb)
        leaves = nxt
    return sorted(leaves)


def _canonical_root(verts: list, adj: list) -> int:
    center = _tree_center(adj)
    if len(center) == 1:
        return center[0]
    # center edge: its endpoints have different parities, fixed by every
    # automorphism; root at the odd one
    u, v = center
    return u if verts[u][0] == "O" else v


def _encode(verts: list, adj: list, v: int, parent: Optional[int]) -> tuple:
    children = sorted(_encode(verts, adj, c, v) for c in adj[v] if c != parent)
    return (verts[v][0], verts[v][1], tuple(children))


def _aut_order(verts: list, adj: list, v: int, parent: Optional[int]) -> int:
    order = 1
    encs = []
    for c in adj[v]:
        if c != parent:
            encs.append((_encode(verts, adj, c, v), c))
            order *= _aut_order(verts, adj, c, v)
    encs.sort(key=lambda t: t[0])
    for _, grp in itertools.groupby(encs, key=lambda t: t[0]):
        order *= factorial(len(tuple(grp)))
    if verts[v][0] == "E":
        legs = verts[v][1][-1]  # last payload entry in both decorated forms
        for _, grp in itertools.groupby(legs):
            order *= factorial(len(tuple(grp)))
    return order


def _graph_to_profile(m: int, verts: list, adj: list) -> Profile:
    odd = []
    even = []
    index_map = {}
    for i, (kind, payload) in enumerate(verts):
        if kind == "O":
            beta0, a, dt, cv = payload
            index_map[i] = ("O", len(odd))
            odd.append((beta0, a, dt, cv, len(adj[i])))
        else:
            khat, l0, legs = payload
            index_map[i] = ("E", len(even))
            even.append((khat, l0, legs, len(adj[i])))
    edges = []
    for i, (kind, _) in enumerate(verts):
        if kind == "O":
            for j in adj[i]:
                edges.append((index_map[i][1], index_map[j][1]))
    return Profile(m, tuple(odd), tuple(even), tuple(sorted(edges)))


def enumerate_orbits(key: InvariantKey) -> Iterator[tuple]:
    """Yield (Profile, aut_order) over isomorphism classes of profiles."""
    m, k, lvec, beta = key.m, key.k, key.lvec, key.beta

    # a lone odd vertex (possible only without boundary points)
    if k == 0 and beta % 2 == 1:
        for a in range(1, 2 * m + 1):
            dt2 = beta - 1  # beta0 + 2dt = beta
            for beta0 in range(1, beta + 1, 2):
                dt = (beta - beta0) // 2
                node = ("O", beta0, a, dt, lvec, ())
                verts, adj = _build_graph(node)
                yield _graph_to_profile(m, verts, adj), 1

    enum = _ShapeEnumerator(key)
    seen: set = set()
    for node, (cb, ck, clv) in enum.even_subtrees(beta, k, lvec, False):
        if cb != beta or ck != k or clv != lvec:
            continue
        verts, adj = _build_graph(node)
        root = _canonical_root(verts, adj)
        enc = _encode(verts, adj, root, None)
        if enc in seen:
            continue
        seen.add(enc)
        yield _graph_to_profile(m, verts, adj), _aut_order(verts, adj, root, None)


# ---------------------------------------------------------------------------
# skeletons: profiles with the boundary-point distribution factored out
# ---------------------------------------------------------------------------
#
# The sum over ways to distribute the k labeled boundary points across even
# vertices factorizes: with f_v(khat) the khat-dependent part of a vertex
# factor, the orbit sum equals
#
#   sum_skeletons (1/|Aut_skel|) * k! * [x^k] prod_v F_v(x),
#   F_v(x) = sum_khat f_v(khat) x^khat / khat!,
#
# because summing khat-assignments over an Aut_skel-orbit and dividing by
# the stabilizer order is the same as summing all assignments and dividing
# by |Aut_skel|.  This turns the dominant boundary-distribution blowup into
# a short polynomial product per skeleton.


def _khat_support_min(l0: int, s: int, heads: int) -> Optional[int]:
    """Smallest khat with a nonzero boundary polynomial entry, or None.

    For s = 0 the descendent dimension pins khat + heads = 3 - 2*l0
    exactly; otherwise the smallest khat of the right parity satisfying
    ghost-disc stability."""
    if s == 0:
        khat = 3 - 2 * l0 - heads
        return khat if khat >= 0 else None
    lo = max(0, 3 - 2 * (l0 + s) - heads)
    if (lo + heads) % 2 == 0:
        lo += 1
    return lo


class _SkeletonEnumerator:
    """Like _ShapeEnumerator but with khat replaced by its minimum viable
    boundary-point cost (the actual khat sum is contracted later through
    the per-vertex generating polynomials)."""

    def __init__(self, key: InvariantKey):
        self.key = key
        self.m = key.m
        self.zero_lv = (0,) * (2 * self.m + 1)
        self._odd_cat: dict = {}
        self._even_cat: dict = {}
        self._leg_ms: dict = {}
        self._cv_opt: dict = {}

    def _cv_options(self, blv: tuple) -> list:
        if blv not in self._cv_opt:
            ranges = [range(c + 1) for c in blv]
            self._cv_opt[blv] = [tuple(c) for c in itertools.product(*ranges)]
        return self._cv_opt[blv]

    def _leg_multisets(self, bb: int, blv: tuple) -> list:
        # legs are (d, dt, cv): the fixed-point index is summed analytically
        mkey = (bb, blv)
        if mkey in self._leg_ms:
            return self._leg_ms[mkey]
        types = []
        for d in range(1, bb // 2 + 1):
            for dt in range(0, (bb - 2 * d) // 2 + 1):
                for cv in self._cv_options(blv):
                    types.append(((d, dt, cv), 2 * (d + dt), cv))
        out = []

        def rec(start: int, bb_left: int, blv_left: tuple, acc: tuple):
            out.append((acc, bb - bb_left, _sub_lv(blv, blv_left)))
            for i in range(start, len(types)):
                leg, cost_b, cost_lv = types[i]
                if cost_b > bb_left or any(c > r for c, r in zip(cost_lv, blv_left)):
                    continue
                rec(i, bb_left - cost_b, _sub_lv(blv_left, cost_lv), acc + (leg,))

        rec(0, bb, blv, ())
        self._leg_ms[mkey] = out
        return out

    def odd_subtrees(self, bb: int, bk: int, blv: tuple) -> list:
        """Entries (node, (beta_cost, khat_min_cost, lvec_cost))."""
        mkey = (bb, bk, blv)
        if mkey in self._odd_cat:
            return self._odd_cat[mkey]
        out = []
        for beta0 in range(1, bb + 1, 2):
            for dt in range(0, (bb - beta0) // 2 + 1):
                used_b = beta0 + 2 * dt
                for cv in self._cv_options(blv):
                    blv_left = _sub_lv(blv, cv)
                    for children, (cb, ck, clv) in self.even_multisets(bb - used_b, bk, blv_left):
                        node = ("O", beta0, dt, cv, children)
                        out.append((node, (used_b + cb, ck, _add_lv(cv, clv))))
        self._odd_cat[mkey] = out
        return out

    def even_subtrees(self, bb: int, bk: int, blv: tuple, has_parent: bool) -> list:
        mkey = (bb, bk, blv, has_parent)
        if mkey in self._even_cat:
            return self._even_cat[mkey]
        out = []
        for children, (cb1, ck1, clv1) in self.odd_multisets(bb, bk, blv):
            heads = len(children) + (1 if has_parent else 0)
            blv1 = _sub_lv(blv, clv1)
            for legs, cb2, clv2 in self._leg_multisets(bb - cb1, blv1):
                blv2 = _sub_lv(blv1, clv2)
                for l0 in range(0, blv2[0] + 1):
                    kmin = _khat_support_min(l0, len(legs), heads)
                    if kmin is None or ck1 + kmin > bk:
                        continue
                    node = ("E", l0, legs, children)
                    lv_used = _add_lv(_add_lv(clv1, clv2), (l0,) + self.zero_lv[1:])
                    out.append((node, (cb1 + cb2, ck1 + kmin, lv_used)))
        self._even_cat[mkey] = out
        return out

    def even_multisets(self, bb: int, bk: int, blv: tuple) -> list:
        mkey = ("ems", bb, bk, blv)
        if mkey not in self._even_cat:
            self._even_cat[mkey] = self._multisets(self.even_subtrees(bb, bk, blv, True), bb, bk, blv)
        return self._even_cat[mkey]

    def odd_multisets(self, bb: int, bk: int, blv: tuple) -> list:
        mkey = ("oms", bb, bk, blv)
        if mkey not in self._odd_cat:
            self._odd_cat[mkey] = self._multisets(self.odd_subtrees(bb, bk, blv), bb, bk, blv)
        return self._odd_cat[mkey]

    @staticmethod
    def _multisets(cat: list, bb: int, bk: int, blv: tuple) -> list:
        # items sorted by total cost so the scan can stop at the first
        # entry that no longer fits the combined remaining budget
        items = sorted(
            ((e[1][0] + e[1][1] + sum(e[1][2]), e) for e in cat), key=lambda t: t[0]
        )
        out = []

        def rec(start: int, b_left: int, k_left: int, lv_left: tuple, acc: tuple):
            out.append((acc, (bb - b_left, bk - k_left, _sub_lv(blv, lv_left))))
            total_left = b_left + k_left + sum(lv_left)
            for i in range(start, len(items)):
                tot, (node, (cb, ck, clv)) = items[i]
                if tot > total_left:
                    break
                if cb > b_left or ck > k_left or any(c > r for c, r in zip(clv, lv_left)):
                    continue
                rec(i, b_left - cb, k_left - ck, _sub_lv(lv_left, clv), acc + (node,))

        rec(0, bb, bk, blv, ())
        return out


def enumerate_skeletons(key: InvariantKey) -> Iterator[tuple]:
    """Yield (verts, adj, aut) over khat-less isomorphism classes.

    verts[i] = ("O", (beta0, a, dt, cv)) or ("E", (l0, legs)).
    """
    m, k, lvec, beta = key.m, key.k, key.lvec, key.beta
    if k == 0 and beta % 2 == 1:
        for beta0 in range(1, beta + 1, 2):
            dt = (beta - beta0) // 2
            node = ("O", beta0, dt, lvec, ())
            verts, adj = _build_graph(node)
            yield verts, adj, 1

    enum = _SkeletonEnumerator(key)
    seen: set = set()
    for node, (cb, ck, clv) in enum.even_subtrees(beta, k, lvec, False):
        if cb != beta or ck > k or clv != lvec:
            continue
        verts, adj = _build_graph(node)
        root = _canonical_root(verts, adj)
        enc = _encode(verts, adj, root, None)
        if enc in seen:
            continue
        seen.add(enc)
        yield verts, adj, _aut_order(verts, adj, root, None)


def _field_memo(field) -> dict:
    memo = getattr(field, "_skeleton_memo", None)
    if memo is None:
        memo = {}
        field._skeleton_memo = memo
    return memo


def _odd_bundle(field, m: int, beta0: int, dt: int, cv: tuple, deg: int, q_cap: int, eta_caps: tuple):
    """Odd-vertex factor summed over the fixed-point index: the disc Euler
    factor, the propagator power for its deg incident edges, and the tail
    coefficient."""
    memo = _field_memo(field)
    key = ("odd", beta0, dt, cv, deg, q_cap, eta_caps)
    if key not in memo:
        lam = field.lam_prod()
        total = field.zero()
        for a in range(1, 2 * m + 1):
            term = _odd_factor(field, m, beta0, a)
            term = term * ((-(lam / field.alpha(a))) * field.from_rat(rat(beta0, 2))) ** deg
            term = term * field.tail(a, rat(beta0, 2), dt, cv, q_cap, eta_caps)
            total = total + term
        memo[key] = total
    return memo[key]


def _leg_bundle(field, m: int, d: int, dt: int, cv: tuple, b: int, q_cap: int, eta_caps: tuple):
    """Sphere-leg factor summed over the fixed-point index, including the
    descendent-slot weight (-d/alpha)^(b+1) and the tail coefficient."""
    memo = _field_memo(field)
    key = ("leg", d, dt, cv, b, q_cap, eta_caps)
    if key not in memo:
        total = field.zero()
        for a in range(1, 2 * m + 1):
            term = _leg_factor(field, m, d, a)
            term = term * (-(field.from_rat(d) / field.alpha(a))) ** (b + 1)
            term = term * field.tail(a, rat(d), dt, cv, q_cap, eta_caps)
            total = total + term
        memo[key] = total
    return memo[key]


def skeleton_term(key: InvariantKey, verts: list, adj: list, field, q_cap: int, eta_caps: tuple):
    """Field value of one skeleton: odd-vertex bundles times
    k! [x^k] prod_v F_v(x) over the even vertices."""
    m, k = key.m, key.k
    n_odd = sum(1 for kind, _ in verts if kind == "O")
    sign = -1 if (comb(n_odd, 2) * (1 + m)) % 2 else 1
    base = field.from_rat(sign)
    poly = {0: field.from_rat(1)}  # boundary generating polynomial
    for i, (kind, payload) in enumerate(verts):
        deg = len(adj[i])
        if kind == "O":
            beta0, dt, cv = payload
            base = base * _odd_bundle(field, m, beta0, dt, cv, deg, q_cap, eta_caps)
            if base.is_zero():
                return field.zero()
        else:
            l0, legs = payload
            fv = _boundary_poly(field, m, l0, legs, deg, k, q_cap, eta_caps)
            poly = _poly_mul(field, poly, fv, k)
            if not poly:
                return field.zero()
    coeff = poly.get(k)
    if coeff is None or coeff.is_zero():
        return field.zero()
    return base * coeff * field.from_rat(factorial(k))


def _boundary_poly(field, m: int, l0: int, legs: tuple, heads: int, k_max: int, q_cap: int, eta_caps: tuple):
    """F_v(x) = sum over khat of Lambda^(khat-1) b_sum(khat) x^khat / khat!,
    with leg bundles folded into the descendent sum."""
    memo = _field_memo(field)
    mkey = ("bpoly", l0, legs, heads, k_max, q_cap, eta_caps)
    if mkey in memo:
        return memo[mkey]
    lam = field.lam_prod()
    s = len(legs)
    out: dict = {}
    for khat in range(0, k_max + 1):
        big_k = khat + heads
        if big_k % 2 == 0 or 2 * (l0 + s) + big_k < 3:
            continue
        b_total = l0 + s + (big_k - 3) // 2
        if b_total < 0 or (s == 0 and b_total != 0):
            continue
        b_sum = field.zero()
        for b in _compositions_of(b_total, s):
            coeff = f0_coeff(b, l0, big_k)
            if coeff == 0:
                continue
            term = field.from_rat(coeff)
            for (d, dt, cv), bj in zip(legs, b):
                term = term * _leg_bundle(field, m, d, dt, cv, bj, q_cap, eta_caps)
                if term.is_zero():
                    break
            b_sum = b_sum + term
        if b_sum.is_zero():
            continue
        vertex = lam ** (khat - 1) if khat >= 1 else field.from_rat(1) / lam
        out[khat] = vertex * b_sum * field.from_rat(rat(1, factorial(khat)))
    memo[mkey] = out
    return out


def _poly_mul(field, p: dict, q: dict, cap: int) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = e1 + e2
            if e > cap:
                continue
            prod = c1 * c2
            if e in out:
                out[e] = out[e] + prod
            else:
                out[e] = prod
    return {e: c for e, c in out.items() if not c.is_zero()}


def skeleton_interior_labels(key: InvariantKey, verts: list) -> int:
    """Multinomial count of interior label assignments to a skeleton's
    count slots (the boundary multinomial lives in the x-polynomial)."""
    count = 1
    for d_idx, l_d in enumerate(key.lvec):
        remaining = l_d
        total = factorial(l_d)
        for kind, payload in verts:
            if kind == "O":
                cv = payload[2]
                total //= factorial(cv[d_idx])
                remaining -= cv[d_idx]
            else:
                l0, legs = payload
                if d_idx == 0:
                    total //= factorial(l0)
                    remaining -= l0
                for d, dt, cv in legs:
                    total //= factorial(cv[d_idx])
                    remaining -= cv[d_idx]
        assert remaining == 0
        count *= total
    return count


# ---------------------------------------------------------------------------
# contribution of a profile
# ---------------------------------------------------------------------------


def _compositions_of(total: int, parts: int) -> Iterator[tuple]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions_of(total - first, parts - 1):
            yield (first,) + rest


def xi(profile: Profile, field):
    """prod over odd vertices of ((beta0/2) * (-lam_1..lam_m / a_a))^deg."""
    out = field.from_rat(1)
    lam = field.lam_prod()
    for beta0, a, dt, cv, deg in profile.odd:
        base = (-(lam / field.alpha(a))) * field.from_rat(rat(beta0, 2))
        out = out * base**deg
    return out


def contribution(profile: Profile, field, q_cap: int, eta_caps: tuple):
    """Exact fixed-point weight of a sorted profile, as a field element."""
    m = profile.m
    n_odd = profile.n_odd
    sign = -1 if (comb(n_odd, 2) * (1 + m)) % 2 else 1
    total = field.from_rat(sign)
    lam = field.lam_prod()

    for khat, l0, legs, heads in profile.even:
        vertex = lam ** (khat - 1) if khat >= 1 else field.from_rat(1) / lam
        big_k = khat + heads
        s = len(legs)
        b_total = l0 + s + (big_k - 3) // 2
        b_sum = field.zero()
        for b in _compositions_of(b_total, s):
            coeff = f0_coeff(b, l0, big_k)
            if coeff == 0:
                continue
            term = field.from_rat(coeff)
            for (d, a, dt, cv), bj in zip(legs, b):
                term = term * (-(field.from_rat(d) / field.alpha(a))) ** (bj + 1)
            b_sum = b_sum + term
        total = total * vertex * b_sum
        for d, a, dt, cv in legs:
            total = total * _leg_factor(field, m, d, a)
            total = total * field.tail(a, rat(d), dt, cv, q_cap, eta_caps)

    for beta0, a, dt, cv, deg in profile.odd:
        total = total * _odd_factor(field, m, beta0, a)
        base = (-(lam / field.alpha(a))) * field.from_rat(rat(beta0, 2))
        total = total * base**deg
        total = total * field.tail(a, rat(beta0, 2), dt, cv, q_cap, eta_caps)
    return total


def _leg_factor(field, m: int, d: int, a: int):
    """Euler factor of a d-fold cover sphere between the real fixed point
    and fixed point a (tail coefficient not included)."""
    out = field.from_rat(rat((-1) ** d * d ** (2 * d - 1), factorial(d) ** 2))
    for ap in range(1, 2 * m + 1):
        out = out * field.alpha(ap)
    out = out / field.alpha(a) ** (2 * d)
    for c in range(0, d + 1):
        for b in range(0, 2 * m + 1):
            if b in (a, 0):
                continue
            coeffs = [rat(0)] * (2 * m + 1)
            coeffs[a] += rat(c, d)
            coeffs[b] -= 1
            out = out / field.linear_alpha(coeffs)
    return out


def _odd_factor(field, m: int, beta0: int, a: int):
    """Euler factor of the odd intersection disc (its xi power and tail
    coefficient not included)."""
    out = field.from_rat(rat(beta0 ** (beta0 - 1), factorial(beta0) * 2**beta0))
    out = out / field.alpha(a) ** beta0
    abar = 2 * m + 1 - a
    for c in range(0, (beta0 - 1) // 2 + 1):
        for ap in range(0, 2 * m + 1):
            if ap in (a, abar):
                continue
            coeffs = [rat(0)] * (2 * m + 1)
            coeffs[a] += rat(2 * c - beta0, beta0)
            coeffs[ap] -= 1
            out = out / field.linear_alpha(coeffs)
    return out


def label_count(key: InvariantKey, profile: Profile) -> int:
    """Number of assignments of the key's labeled boundary and interior
    points to this profile's count slots."""
    k = key.k
    count = factorial(k)
    for khat, l0, legs, heads in profile.even:
        count //= factorial(khat)
        k -= khat
    assert k == 0
    for d_idx, l_d in enumerate(key.lvec):
        remaining = l_d
        total = factorial(l_d)
        for beta0, a, dt, cv, deg in profile.odd:
            total //= factorial(cv[d_idx])
            remaining -= cv[d_idx]
        for khat, l0, legs, heads in profile.even:
            if d_idx == 0:
                total //= factorial(l0)
                remaining -= l0
            for d, a, dt, cv in legs:
                total //= factorial(cv[d_idx])
                remaining -= cv[d_idx]
        assert remaining == 0
        count *= total
    return count


# ---------------------------------------------------------------------------
# labeled enumeration (reference route, small keys)
# ---------------------------------------------------------------------------


def _all_trees(n: int) -> Iterator[list]:
    """Edge lists of all labeled trees on n vertices (Pruefer sequences)."""
    if n == 1:
        yield []
        return
    if n == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        degree = [1] * n
        for v in seq:
            degree[v] += 1
        edges = []
        degs = list(degree)
        import heapq

        leaves = [i for i in range(n) if degs[i] == 1]
        heapq.heapify(leaves)
        for v in seq:
            leaf = heapq.heappop(leaves)
            edges.append((leaf, v))
            degs[v] -= 1
            if degs[v] == 1:
                heapq.heappush(leaves, v)
        u, w = heapq.heappop(leaves), heapq.heappop(leaves)
        edges.append((u, w))
        yield edges


@dataclass(frozen=True)
class LabeledProfile:
    """A labeled profile: explicit label sets, ordered legs, and the tree."""

    m: int
    odd: tuple  # ((beta0, a, dt, labels), ...)  labels: tuple of (label, deg)
    even: tuple  # ((k_labels, ghost_labels, legs), ...) legs ordered, each (d, a, dt, labels)
    edges: tuple  # ((odd_i, even_j), ...)
    weight_denominator: int  # r! * prod(s_i!)

    def to_profile(self, key: InvariantKey) -> Profile:
        deg_o = [0] * len(self.odd)
        deg_e = [0] * len(self.even)
        for i, j in self.edges:
            deg_o[i] += 1
            deg_e[j] += 1

        def cv_of(labels) -> tuple:
            cv = [0] * (2 * self.m + 1)
            for _, d in labels:
                cv[d] += 1
            return tuple(cv)

        odd = tuple(
            (beta0, a, dt, cv_of(labels), deg_o[i]) for i, (beta0, a, dt, labels) in enumerate(self.odd)
        )
        even = tuple(
            (len(kl), len(gl), tuple(sorted((d, a, dt, cv_of(lb)) for d, a, dt, lb in legs)), deg_e[j])
            for j, (kl, gl, legs) in enumerate(self.even)
        )
        return Profile(self.m, odd, even, self.edges)


def enumerate_labeled(key: InvariantKey) -> Iterator[tuple]:
    """Yield (LabeledProfile, weight) with weight = 1/(r! prod s_i!).

    Intended for small keys: the sum of weight * contribution equals the
    orbit-route sum of contribution / aut, which is the invariant.
    """
    m, k, lvec, beta = key.m, key.k, key.lvec, key.beta
    interior = tuple((i, d) for d in range(2 * m + 1) for i in range(lvec[d]))
    boundary = tuple(range(k))
    seen: set = set()

    max_odd = beta
    for n_odd in range(beta % 2, max_odd + 1, 2):
        for n_even in range(0, _max_even(key, n_odd) + 1):
            n = n_odd + n_even
            if n == 0:
                continue
            if n_odd > 0 and n_even == 0 and n_odd > 1:
                continue  # pure-odd works only as a single vertex
            if n_odd == 0 and n_even > 1:
                continue  # no even-even edges
            for edges in _all_trees(n):
                if any((u < n_odd) == (v < n_odd) for u, v in edges):
                    continue  # must be bipartite odd|even
                deg = [0] * n
                for u, v in edges:
                    deg[u] += 1
                    deg[v] += 1
                for lp in _decorate(key, n_odd, n_even, edges, deg, boundary, interior):
                    canon = _labeled_canonical(lp)
                    if canon in seen:
                        continue
                    seen.add(canon)
                    yield lp, rat(1, lp.weight_denominator)


def _max_even(key: InvariantKey, n_odd: int) -> int:
    # each even vertex needs odd khat + heads; crude bound via stability
    return key.k + 2 * sum(key.lvec) + key.beta + 1


def _decorate(key: InvariantKey, n_odd, n_even, edges, deg, boundary, interior):
    m, beta = key.m, key.beta
    slots = []  # tail slots: ("O", i) or ("L", even_j, leg_idx); ghost: ("G", j)

    def odd_choices(i):
        out = []
        for beta0 in range(1, beta + 1, 2):
            for dt in range(0, (beta - beta0) // 2 + 1):
                for a in range(1, 2 * m + 1):
                    out.append((beta0, a, dt))
        return out

    def leg_lists(budget: int):
        # ordered tuples of (d, a, dt)
        singles = [
            (d, a, dt)
            for d in range(1, budget // 2 + 1)
            for dt in range(0, (budget - 2 * d) // 2 + 1)
            for a in range(1, 2 * m + 1)
        ]
        out = [()]
        frontier = [()]
        while frontier:
            nxt = []
            for tup in frontier:
                used = sum(2 * (d + dt) for d, a, dt in tup)
                for s in singles:
                    if used + 2 * (s[0] + s[2]) <= budget:
                        cand = tup + (s,)
                        nxt.append(cand)
            out.extend(nxt)
            frontier = nxt
        return out

    odd_opts = [odd_choices(i) for i in range(n_odd)]
    for odd_combo in itertools.product(*odd_opts):
        beta_odd = sum(b0 + 2 * dt for b0, a, dt in odd_combo)
        if beta_odd > beta:
            continue
        remaining_beta = beta - beta_odd
        for legs_combo in itertools.product(*[leg_lists(remaining_beta)] * n_even):
            beta_legs = sum(2 * (d + dt) for legs in legs_combo for d, a, dt in legs)
            if beta_odd + beta_legs != beta:
                continue
            # boundary labels to even vertices
            for k_assign in _assignments(boundary, n_even):
                ok = True
                for j in range(n_even):
                    heads = deg[n_odd + j]
                    big_k = len(k_assign[j]) + heads
                    if big_k % 2 == 0:
                        ok = False
                        break
                if not ok:
                    continue
                # interior labels to slots
                slot_list = [("O", i) for i in range(n_odd)]
                for j, legs in enumerate(legs_combo):
                    slot_list.extend(("L", j, t) for t in range(len(legs)))
                slot_list.extend(("G", j) for j in range(n_even))
                for i_assign in _slot_assignments(interior, slot_list):
                    # ghost slots accept only degree-0 labels
                    bad = any(
                        kind == "G" and d != 0
                        for (lab, d), (kind, *rest) in zip(interior, i_assign)
                    )
                    if bad:
                        continue
                    stable = True
                    for j in range(n_even):
                        heads = deg[n_odd + j]
                        l0 = sum(
                            1 for (lab, d), sl in zip(interior, i_assign) if sl == ("G", j)
                        )
                        s = len(legs_combo[j])
                        if 2 * (l0 + s) + len(k_assign[j]) + heads < 3:
                            stable = False
                            break
                    if not stable:
                        continue
                    yield _assemble(key, n_odd, n_even, edges, odd_combo, legs_combo, k_assign, i_assign, interior)


def _assignments(labels: tuple, bins: int):
    if bins == 0:
        if not labels:
            yield ()
        return
    for choice in itertools.product(range(bins), repeat=len(labels)):
        out = [tuple(lab for lab, b in zip(labels, choice) if b == j) for j in range(bins)]
        yield tuple(out)


def _slot_assignments(interior: tuple, slot_list: list):
    for choice in itertools.product(slot_list, repeat=len(interior)) if interior else [()]:
        yield choice


def _assemble(key, n_odd, n_even, edges, odd_combo, legs_combo, k_assign, i_assign, interior):
    m = key.m
    odd = []
    for i, (beta0, a, dt) in enumerate(odd_combo):
        labels = tuple(sorted(lab for lab, sl in zip(interior, i_assign) if sl == ("O", i)))
        odd.append((beta0, a, dt, labels))
    even = []
    r = len(edges)
    weight_den = factorial(r)
    for j, legs in enumerate(legs_combo):
        weight_den *= factorial(len(legs))
        ghost = tuple(sorted(lab for lab, sl in zip(interior, i_assign) if sl == ("G", j)))
        leg_objs = []
        for t, (d, a, dt) in enumerate(legs):
            lb = tuple(sorted(lab for lab, sl in zip(interior, i_assign) if sl == ("L", j, t)))
            leg_objs.append((d, a, dt, lb))
        even.append((k_assign[j], ghost, tuple(leg_objs)))
    prof_edges = tuple(sorted((u if u < n_odd else v, (v if v >= n_odd else u) - n_odd) for u, v in edges))
    return LabeledProfile(m, tuple(odd), tuple(even), prof_edges, weight_den)


def _labeled_canonical(lp: LabeledProfile):
    """Canonical form modulo re-indexing vertices (legs stay ordered)."""
    n_odd, n_even = len(lp.odd), len(lp.even)
    verts = [("O", lp.odd[i]) for i in range(n_odd)] + [("E", lp.even[j]) for j in range(n_even)]
    adj: list = [[] for _ in verts]
    for i, j in lp.edges:
        adj[i].append(n_odd + j)
        adj[n_odd + j].append(i)
    root = _canonical_root(verts, adj)
    return _encode(verts, adj, root, None)
