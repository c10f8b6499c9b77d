"""Brute-force reference implementations used as ground truth.

Everything here recomputes definitions directly: containment checks walk
pattern vertices in fixed index order over set-based adjacency (no bitset
intersections, no precompiled templates, no orbit collapsing), densities
come from explicit subset enumeration.  Size limits are hard errors -- an
oracle must never silently approximate.

These ship in the production package so the `verify` CLI can run fast-vs-
oracle equivalence end to end.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations
from typing import Optional

from .graphs import SimpleGraph, pair_index
from .patterns import Pattern

HOST_LIMIT = 25
COPY_PATTERN_LIMIT = 6
SUBSET_SCAN_LIMIT = 20
BOUNDED_SCAN_HOST_LIMIT = 60
BOUNDED_SCAN_CAP_LIMIT = 12


def _adj_sets(g: SimpleGraph) -> list[set[int]]:
    return [set(g.neighbors(v)) for v in range(g.n)]


def _check_host(g: SimpleGraph) -> None:
    if g.n > HOST_LIMIT:
        raise ValueError(f"oracle host limit is {HOST_LIMIT} vertices, got {g.n}")


def _has_copy_through_pair(p: Pattern, adj: list[set[int]], n: int,
                           u: int, v: int) -> bool:
    """Does the host (given by adjacency sets) contain a copy of ``p`` that
    uses the host edge {u,v}?  Tries every ordered pattern edge as the
    preimage of (u, v) and extends the remaining pattern vertices in index
    order, checking all pattern edges among assigned vertices."""
    k = p.n
    pedges = p.edges
    rest_order = list(range(k))

    def extend(img: dict[int, int], used: set[int]) -> bool:
        if len(img) == k:
            return True
        pv = next(w for w in rest_order if w not in img)
        for hv in range(n):
            if hv in used:
                continue
            ok = True
            for (a, b) in pedges:
                if a == pv and b in img and img[b] not in adj[hv]:
                    ok = False
                    break
                if b == pv and a in img and img[a] not in adj[hv]:
                    ok = False
                    break
            if ok:
                img[pv] = hv
                used.add(hv)
                if extend(img, used):
                    return True
                used.remove(hv)
                del img[pv]
        return False

    for (a, b) in pedges:
        for (ha, hb) in ((u, v), (v, u)):
            img = {a: ha, b: hb}
            if extend(img, {ha, hb}):
                return True
    return False


def _copy_through_pair_using(p: Pattern, adj: list[set[int]], n: int,
                             u: int, v: int, x: int, y: int) -> bool:
    """Like _has_copy_through_pair but the copy must use both host edges
    {u,v} and {x,y}."""
    k = p.n
    pedges = p.edges

    def uses_xy(img: dict[int, int]) -> bool:
        for (a, b) in pedges:
            if {img[a], img[b]} == {x, y}:
                return True
        return False

    def extend(img: dict[int, int], used: set[int]) -> bool:
        if len(img) == k:
            return uses_xy(img)
        pv = next(w for w in range(k) if w not in img)
        for hv in range(n):
            if hv in used:
                continue
            ok = True
            for (a, b) in pedges:
                if a == pv and b in img and img[b] not in adj[hv]:
                    ok = False
                    break
                if b == pv and a in img and img[a] not in adj[hv]:
                    ok = False
                    break
            if ok:
                img[pv] = hv
                used.add(hv)
                if extend(img, used):
                    return True
                used.remove(hv)
                del img[pv]
        return False

    for (a, b) in pedges:
        for (ha, hb) in ((u, v), (v, u)):
            img = {a: ha, b: hb}
            if extend(img, {ha, hb}):
                return True
    return False


def naive_contains(p: Pattern, g: SimpleGraph) -> bool:
    """Definitional containment check (any copy, not anchored)."""
    _check_host(g)
    adj = _adj_sets(g)
    if p.edge_count == 0:
        return p.n <= g.n
    u0, v0 = p.edges[0]
    for hu in range(g.n):
        for hv in adj[hu]:
            img = {u0: hu, v0: hv}
            if _extend_plain(p, adj, g.n, img, {hu, hv}):
                return True
    return False


def _extend_plain(p: Pattern, adj: list[set[int]], n: int,
                  img: dict[int, int], used: set[int]) -> bool:
    if len(img) == p.n:
        return True
    pv = next(w for w in range(p.n) if w not in img)
    for hv in range(n):
        if hv in used:
            continue
        ok = True
        for (a, b) in p.edges:
            if a == pv and b in img and img[b] not in adj[hv]:
                ok = False
                break
            if b == pv and a in img and img[a] not in adj[hv]:
                ok = False
                break
        if ok:
            img[pv] = hv
            used.add(hv)
            if _extend_plain(p, adj, n, img, used):
                return True
            used.remove(hv)
            del img[pv]
    return False


def naive_closed_set(g: SimpleGraph, p: Pattern) -> set[int]:
    """Pair ids of all non-edges whose addition would complete a copy of
    ``p`` through them (the definitional closed set)."""
    _check_host(g)
    closed = set()
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if g.has_edge(u, v):
                continue
            scratch = g.copy()
            scratch.add_edge(u, v)
            adj = _adj_sets(scratch)
            if _has_copy_through_pair(p, adj, scratch.n, u, v):
                closed.add(pair_index(u, v, g.n))
    return closed


def naive_C_uv(g: SimpleGraph, p: Pattern, uv: tuple[int, int]) -> set[int]:
    """Pair ids xy (non-edges distinct from uv, themselves not closed) such
    that adding both uv and xy creates a copy of ``p`` using both."""
    _check_host(g)
    u, v = uv
    if g.has_edge(u, v):
        raise ValueError(f"pair ({u},{v}) is already an edge")
    closed = naive_closed_set(g, p)
    if pair_index(u, v, g.n) in closed:
        raise ValueError(f"pair ({u},{v}) is closed")
    out = set()
    for x in range(g.n):
        for y in range(x + 1, g.n):
            if g.has_edge(x, y) or {x, y} == {u, v}:
                continue
            if pair_index(x, y, g.n) in closed:
                continue
            scratch = g.copy()
            scratch.add_edge(u, v)
            scratch.add_edge(x, y)
            adj = _adj_sets(scratch)
            if _copy_through_pair_using(p, adj, scratch.n, u, v, x, y):
                out.add(pair_index(x, y, g.n))
    return out


def naive_is_maximal_free(g: SimpleGraph, p: Pattern) -> bool:
    """True iff g has no copy of p and every non-edge addition creates one."""
    _check_host(g)
    if naive_contains(p, g):
        return False
    want = {pair_index(u, v, g.n)
            for u in range(g.n) for v in range(u + 1, g.n)
            if not g.has_edge(u, v)}
    return naive_closed_set(g, p) == want


def naive_max_density(g: SimpleGraph, size_cap: Optional[int] = None,
                      ) -> tuple[Fraction, tuple[int, ...]]:
    """Exact max of e(A)/|A| by explicit subset enumeration.

    Full scan for hosts up to 20 vertices; with a cap <= 12 hosts up to 60
    vertices are allowed and the scan runs over connected subsets plus
    singletons (the maximum ratio is always attained on a connected set).
    """
    n = g.n
    if size_cap is None:
        if n > SUBSET_SCAN_LIMIT:
            raise ValueError(f"full subset scan limited to {SUBSET_SCAN_LIMIT} vertices")
        best = Fraction(0)
        best_wit: Optional[tuple[int, ...]] = None
        for size in range(1, n + 1):
            for sub in combinations(range(n), size):
                dens = Fraction(g.induced_edge_count(sub), size)
                if best_wit is None or dens > best:
                    best, best_wit = dens, sub
                elif dens == best and sub < best_wit:
                    best_wit = sub
        assert best_wit is not None
        return best, best_wit
    if size_cap < 1:
        raise ValueError("size_cap must be >= 1")
    if size_cap > BOUNDED_SCAN_CAP_LIMIT or n > BOUNDED_SCAN_HOST_LIMIT:
        raise ValueError(
            f"bounded scan limited to cap {BOUNDED_SCAN_CAP_LIMIT} on hosts "
            f"up to {BOUNDED_SCAN_HOST_LIMIT} vertices")
    adj = _adj_sets(g)
    best = Fraction(0)
    best_wit = (0,)
    seen: set[frozenset[int]] = set()

    def grow(cur: frozenset[int], frontier: set[int]) -> None:
        nonlocal best, best_wit
        e = g.induced_edge_count(cur)
        dens = Fraction(e, len(cur))
        wit = tuple(sorted(cur))
        if dens > best or (dens == best and wit < best_wit):
            best, best_wit = dens, wit
        if len(cur) >= size_cap:
            return
        for w in sorted(frontier):
            nxt = cur | {w}
            if nxt in seen:
                continue
            seen.add(nxt)
            grow(nxt, (frontier | adj[w]) - nxt)

    for v in range(n):
        grow(frozenset([v]), set(adj[v]))
    return best, best_wit


def naive_count_copies(p: Pattern, g: SimpleGraph) -> int:
    """Number of distinct copies of ``p`` in ``g``: labeled embeddings
    counted by fixed-order extension, divided by aut(p) computed here by
    full permutation scan."""
    _check_host(g)
    if p.n > COPY_PATTERN_LIMIT:
        raise ValueError(f"copy counting limited to patterns on {COPY_PATTERN_LIMIT} vertices")
    if p.n > g.n:
        return 0
    adj = _adj_sets(g)
    labeled = 0

    def extend(img: dict[int, int], used: set[int]) -> None:
        nonlocal labeled
        if len(img) == p.n:
            labeled += 1
            return
        pv = len(img)  # fixed index order
        for hv in range(g.n):
            if hv in used:
                continue
            ok = True
            for (a, b) in p.edges:
                if a == pv and b in img and img[b] not in adj[hv]:
                    ok = False
                    break
                if b == pv and a in img and img[a] not in adj[hv]:
                    ok = False
                    break
            if ok:
                img[pv] = hv
                used.add(hv)
                extend(img, used)
                used.remove(hv)
                del img[pv]

    extend({}, set())
    aut = 0
    padj = [set() for _ in range(p.n)]
    for a, b in p.edges:
        padj[a].add(b)
        padj[b].add(a)
    for perm in permutations(range(p.n)):
        if all((perm[b] in padj[perm[a]]) == (b in padj[a])
               for a in range(p.n) for b in range(a + 1, p.n)):
            aut += 1
    assert labeled % aut == 0
    return labeled // aut
