"""Fixed pattern graphs: parsing, automorphisms, density functionals,
embedding enumeration and closure templates.

A Pattern is an immutable small graph used either as the forbidden graph of
the constrained process (must be connected and strictly 2-balanced) or as a
target subgraph for counting (arbitrary simple graph).  All densities are
exact `Fraction`s so strict inequalities are never blurred by floats.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Optional, Sequence

from .graphs import SimpleGraph, iter_bits

AUT_VERTEX_LIMIT = 16          # exact automorphism counting regime
BALANCE_VERTEX_LIMIT = 12      # subgraph enumeration regime
DENSITY_VERTEX_LIMIT = 24      # full subset-scan regime
AUT_LIST_LIMIT = 500_000       # max automorphisms we are willing to list


class Pattern:
    """Immutable simple graph on vertices {0..n-1} with cached invariants."""

    def __init__(self, n: int, edges: Sequence[tuple[int, int]], name: str = ""):
        if n < 1:
            raise ValueError("pattern needs at least one vertex")
        seen = set()
        norm = []
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop edge ({u},{v}) in pattern")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise ValueError(f"duplicate edge {e} in pattern")
            seen.add(e)
            norm.append(e)
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(norm))
        self.name = name or f"({n}v{len(norm)}e)"
        self.adj = [0] * n
        for u, v in self.edges:
            self.adj[u] |= 1 << v
            self.adj[v] |= 1 << u
        self.degrees = [a.bit_count() for a in self.adj]
        self._aut: Optional[int] = None
        self._aut_list: Optional[list[tuple[int, ...]]] = None
        self._templates: Optional[list["ClosureTemplate"]] = None

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        seen = 1
        stack = [0]
        count = 1
        while stack:
            u = stack.pop()
            for w in iter_bits(self.adj[u] & ~seen):
                seen |= 1 << w
                count += 1
                stack.append(w)
        return count == self.n

    def to_graph(self) -> SimpleGraph:
        g = SimpleGraph(self.n)
        for u, v in self.edges:
            g.add_edge(u, v)
        return g

    def __repr__(self) -> str:
        return f"Pattern({self.name!r}, n={self.n}, e={self.edge_count})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Pattern) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))


# ── parsing ──────────────────────────────────────────────────────────────
# Grammar: family token C<k> | K<k> | K<a>,<b> | Q3, or "edges: u-v,u-v,…"
# with 1-based vertex labels in the explicit form.

_FAMILY_RE = re.compile(r"^(C|K|Q)(\d+)(?:,(\d+))?$")


def parse_pattern(spec: str) -> Pattern:
    spec = spec.strip()
    if spec.lower().startswith("edges:"):
        body = spec[len("edges:"):].strip()
        if not body:
            raise ValueError("empty edge list in pattern spec")
        edges = []
        maxv = 0
        for tok in body.split(","):
            tok = tok.strip()
            m = re.match(r"^(\d+)-(\d+)$", tok)
            if not m:
                raise ValueError(f"malformed edge token {tok!r} (expected u-v)")
            u, v = int(m.group(1)), int(m.group(2))
            if u < 1 or v < 1:
                raise ValueError(f"vertices are 1-based in edge specs: {tok!r}")
            edges.append((u - 1, v - 1))
            maxv = max(maxv, u, v)
        return Pattern(maxv, edges, name=f"edges:{body.replace(' ', '')}")
    m = _FAMILY_RE.match(spec)
    if not m:
        raise ValueError(f"unrecognized pattern spec {spec!r}")
    fam, a, b = m.group(1), int(m.group(2)), m.group(3)
    if fam == "C":
        if b is not None or a < 3:
            raise ValueError(f"cycle spec needs C<k> with k >= 3, got {spec!r}")
        return Pattern(a, [(i, (i + 1) % a) for i in range(a)], name=f"C{a}")
    if fam == "Q":
        if a != 3 or b is not None:
            raise ValueError(f"only Q3 (the 3-cube) is supported, got {spec!r}")
        edges = [(x, x ^ (1 << i)) for x in range(8) for i in range(3) if x < x ^ (1 << i)]
        return Pattern(8, edges, name="Q3")
    if b is None:
        if a < 1:
            raise ValueError(f"complete graph spec needs K<k> with k >= 1, got {spec!r}")
        return Pattern(a, list(combinations(range(a), 2)), name=f"K{a}")
    bb = int(b)
    if a < 1 or bb < 1:
        raise ValueError(f"bipartite spec needs positive part sizes, got {spec!r}")
    edges = [(i, a + j) for i in range(a) for j in range(bb)]
    return Pattern(a + bb, edges, name=f"K{a},{bb}")


def validate_as_constraint(p: Pattern) -> None:
    """Raise unless ``p`` can serve as the forbidden graph of the process."""
    if p.edge_count == 0:
        raise ValueError(f"{p.name}: empty pattern cannot be the forbidden graph")
    if not p.is_connected():
        raise ValueError(f"{p.name}: forbidden graph must be connected")
    if not is_strictly_two_balanced(p):
        raise ValueError(f"{p.name}: forbidden graph must be strictly 2-balanced")


# ── automorphisms ────────────────────────────────────────────────────────

def _automorphism_backtrack(p: Pattern, collect: Optional[list] = None,
                            limit: Optional[int] = None) -> int:
    """Count (and optionally collect) automorphisms by backtracking with
    degree pruning.  Returns the count."""
    n = p.n
    adj = p.adj
    deg = p.degrees
    # order vertices by (degree, index) descending degree for early pruning
    order = sorted(range(n), key=lambda v: (-deg[v], v))
    img = [-1] * n
    used = [False] * n
    count = 0

    def place(i: int) -> None:
        nonlocal count
        if i == n:
            count += 1
            if collect is not None:
                collect.append(tuple(img))
                if limit is not None and count > limit:
                    raise OverflowError("automorphism list limit exceeded")
            return
        v = order[i]
        for w in range(n):
            if used[w] or deg[w] != deg[v]:
                continue
            ok = True
            for j in range(i):
                u = order[j]
                if ((adj[v] >> u) & 1) != ((adj[w] >> img[u]) & 1):
                    ok = False
                    break
            if ok:
                img[v] = w
                used[w] = True
                place(i + 1)
                used[w] = False
                img[v] = -1

    place(0)
    return count


def count_automorphisms(p: Pattern) -> int:
    if p.n > AUT_VERTEX_LIMIT:
        raise ValueError(f"automorphism counting limited to {AUT_VERTEX_LIMIT} vertices")
    if p._aut is None:
        p._aut = _automorphism_backtrack(p)
    return p._aut


def automorphism_list(p: Pattern) -> list[tuple[int, ...]]:
    """All automorphisms as vertex-image tuples (used for edge orbits)."""
    if p._aut_list is None:
        if count_automorphisms(p) > AUT_LIST_LIMIT:
            raise ValueError(f"{p.name}: too many automorphisms to list")
        perms: list[tuple[int, ...]] = []
        _automorphism_backtrack(p, collect=perms, limit=AUT_LIST_LIMIT)
        p._aut_list = perms
    return p._aut_list


# ── density functionals ──────────────────────────────────────────────────

def two_density(p: Pattern) -> Fraction:
    """(e-1)/(v-2); defined only for patterns on at least 3 vertices."""
    if p.n < 3:
        raise ValueError("2-density requires at least 3 vertices")
    return Fraction(p.edge_count - 1, p.n - 2)


def is_strictly_two_balanced(p: Pattern) -> bool:
    """True iff v,e >= 3 and every proper subgraph on >= 3 vertices has
    strictly smaller 2-density.  Checked over proper induced subgraphs,
    which dominate all subgraphs on the same vertex set."""
    if p.n > BALANCE_VERTEX_LIMIT:
        raise ValueError(f"balance check limited to {BALANCE_VERTEX_LIMIT} vertices")
    if p.n < 3 or p.edge_count < 3:
        return False
    d2 = two_density(p)
    g = p.to_graph()
    for size in range(3, p.n):
        for sub in combinations(range(p.n), size):
            e = g.induced_edge_count(sub)
            if e >= 1 and Fraction(e - 1, size - 2) >= d2:
                return False
    return True


def max_density(g, size_cap: Optional[int] = None,
                ) -> tuple[Fraction, tuple[int, ...]]:
    """Maximum of e(A)/|A| over nonempty vertex subsets A, with witness.

    Without a cap this is an exact full subset scan (hosts up to 24
    vertices).  With a cap the scan runs exactly over subsets of size <=
    size_cap when the enumeration is small enough, and otherwise falls back
    to the local-search heuristic (a lower bound) from the density module.
    Ties go to the lexicographically smallest sorted witness.
    """
    if isinstance(g, Pattern):
        g = g.to_graph()
    n = g.n
    if size_cap is None:
        if n > DENSITY_VERTEX_LIMIT:
            raise ValueError(f"exact subset scan limited to {DENSITY_VERTEX_LIMIT} vertices")
        best = Fraction(0)
        best_wit: Optional[tuple[int, ...]] = None
        adj = g.adj
        for mask in range(1, 1 << n):
            size = mask.bit_count()
            e = 0
            m = mask
            while m:
                lsb = m & -m
                e += (adj[lsb.bit_length() - 1] & mask).bit_count()
                m ^= lsb
            dens = Fraction(e // 2, size)
            if dens > best or best_wit is None:
                best = dens
                best_wit = tuple(iter_bits(mask))
            elif dens == best:
                wit = tuple(iter_bits(mask))
                if wit < best_wit:
                    best_wit = wit
        assert best_wit is not None
        return best, best_wit
    if size_cap < 1:
        raise ValueError("size_cap must be >= 1")
    cap = min(size_cap, n)
    total = 0
    feasible = True
    binom = 1
    for j in range(1, cap + 1):
        binom = binom * (n - j + 1) // j
        total += binom
        if total > 2_000_000:
            feasible = False
            break
    if feasible:
        best = Fraction(0)
        best_wit = None
        for size in range(1, cap + 1):
            for sub in combinations(range(n), size):
                dens = Fraction(g.induced_edge_count(sub), size)
                if dens > best or best_wit is None:
                    best, best_wit = dens, sub
                elif dens == best and sub < best_wit:
                    best_wit = sub
        assert best_wit is not None
        return best, best_wit
    from .density import local_search_density
    return local_search_density(g, cap)


# ── embedding enumeration ────────────────────────────────────────────────

def _extension_order(p: Pattern, start: Sequence[int]) -> list[int]:
    """Vertex order starting with ``start``, then greedily maximizing edges
    to already-ordered vertices (ties to higher degree, then lower index)."""
    placed = list(start)
    placed_mask = 0
    for v in placed:
        placed_mask |= 1 << v
    while len(placed) < p.n:
        best_v, best_key = -1, None
        for v in range(p.n):
            if (placed_mask >> v) & 1:
                continue
            key = ((p.adj[v] & placed_mask).bit_count(), p.degrees[v], -v)
            if best_key is None or key > best_key:
                best_v, best_key = v, key
        placed.append(best_v)
        placed_mask |= 1 << best_v
    return placed


def _compile_plan(p: Pattern, order: Sequence[int]) -> list[tuple[int, tuple[int, ...]]]:
    """For each position past the anchor prefix, the pattern vertex placed
    there and the order-positions of its already-placed neighbors."""
    pos_of = {v: i for i, v in enumerate(order)}
    plan = []
    for i, v in enumerate(order):
        parents = tuple(pos_of[w] for w in iter_bits(p.adj[v]) if pos_of[w] < i)
        plan.append((v, parents))
    return plan


def _run_plan(plan, g: SimpleGraph, img: list[int], used: int,
              start_pos: int) -> Iterator[tuple[int, ...]]:
    """Backtracking over the compiled plan; ``img`` is indexed by plan
    position, already filled for positions < start_pos."""
    n_pos = len(plan)
    adj = g.adj
    full = (1 << g.n) - 1

    def rec(i: int, used: int) -> Iterator[tuple[int, ...]]:
        if i == n_pos:
            yield tuple(img)
            return
        _, parents = plan[i]
        if parents:
            cand = full
            for pp in parents:
                cand &= adj[img[pp]]
            cand &= ~used
        else:
            cand = full & ~used
        for w in iter_bits(cand):
            img[i] = w
            yield from rec(i + 1, used | (1 << w))

    yield from rec(start_pos, used)


def enumerate_embeddings(p: Pattern, g: SimpleGraph,
                         anchor: Optional[tuple[int, tuple[int, int]]] = None,
                         ) -> Iterator[tuple[int, ...]]:
    """Yield every injective homomorphism of ``p`` into ``g`` as a tuple
    ``img`` with ``img[pattern_vertex] = host_vertex``.

    With ``anchor=(edge_role, (x, y))`` only embeddings mapping pattern edge
    ``p.edges[edge_role]`` onto the host edge {x,y} are produced, in both
    orientations.  The host pair must be an edge of ``g``.
    """
    if p.n > g.n:
        return
    if anchor is None:
        order = _extension_order(p, [max(range(p.n), key=lambda v: (p.degrees[v], -v))])
        plan = _compile_plan(p, order)
        img_pos = [-1] * p.n
        for img in _run_plan(plan, g, img_pos, 0, 0):
            out = [-1] * p.n
            for i, (v, _) in enumerate(plan):
                out[v] = img[i]
            yield tuple(out)
        return
    role, (x, y) = anchor
    if not g.has_edge(x, y):
        raise ValueError(f"anchor pair ({x},{y}) is not a host edge")
    a, b = p.edges[role]
    order = _extension_order(p, [a, b])
    plan = _compile_plan(p, order)
    for hx, hy in ((x, y), (y, x)):
        img_pos = [-1] * p.n
        img_pos[0], img_pos[1] = hx, hy
        used = (1 << hx) | (1 << hy)
        for img in _run_plan(plan, g, img_pos, used, 2):
            out = [-1] * p.n
            for i, (v, _) in enumerate(plan):
                out[v] = img[i]
            yield tuple(out)


def contains_copy(p: Pattern, g: SimpleGraph) -> bool:
    for _ in enumerate_embeddings(p, g):
        return True
    return False


def count_embeddings(p: Pattern, g: SimpleGraph) -> int:
    return sum(1 for _ in enumerate_embeddings(p, g))


# ── closure templates ────────────────────────────────────────────────────

class ClosureTemplate:
    """One edge-orbit of the forbidden graph H: the pattern H minus a
    representative edge f, the roles of f's endpoints (the pair that a
    matching embedding would close), and the base-edge roles that need to
    be anchored at a newly added host edge (one per orbit of base edges
    under the automorphisms of the base stabilizing the missing pair)."""

    __slots__ = ("base", "missing_pair", "anchor_roles", "_plans")

    def __init__(self, base: Pattern, missing_pair: tuple[int, int],
                 anchor_roles: tuple[int, ...]):
        self.base = base
        self.missing_pair = missing_pair
        self.anchor_roles = anchor_roles
        # per anchor role: compiled extension plan and the plan positions of
        # the missing pair, for the hot path in the process engine
        self._plans = []
        for role in anchor_roles:
            a, b = base.edges[role]
            order = _extension_order(base, [a, b])
            plan = _compile_plan(base, order)
            pos_of = {v: i for i, (v, _) in enumerate(plan)}
            mp = (pos_of[missing_pair[0]], pos_of[missing_pair[1]])
            self._plans.append((plan, mp))


def _edge_orbits(p: Pattern, perms: list[tuple[int, ...]],
                 edges: Sequence[tuple[int, int]]) -> list[list[int]]:
    orbit_of = {}
    orbits: list[list[int]] = []
    index_of = {e: i for i, e in enumerate(edges)}
    for i, (u, v) in enumerate(edges):
        if i in orbit_of:
            continue
        orbit = set()
        for perm in perms:
            e2 = (min(perm[u], perm[v]), max(perm[u], perm[v]))
            orbit.add(index_of[e2])
        orbits.append(sorted(orbit))
        for j in orbit:
            orbit_of[j] = len(orbits) - 1
    return orbits


def closure_templates(p: Pattern) -> list[ClosureTemplate]:
    """Templates for incremental closure detection, one per orbit of edges
    of ``p`` under its automorphism group."""
    validate_as_constraint(p)
    if p._templates is not None:
        return p._templates
    perms = automorphism_list(p)
    templates = []
    for orbit in _edge_orbits(p, perms, p.edges):
        f = p.edges[orbit[0]]
        base_edges = [e for i, e in enumerate(p.edges) if i != orbit[0]]
        base = Pattern(p.n, base_edges, name=f"{p.name}-minus-{f}")
        if not base.is_connected():
            raise ValueError(f"{p.name}: template base unexpectedly disconnected")
        stab = [perm for perm in automorphism_list(base)
                if {perm[f[0]], perm[f[1]]} == {f[0], f[1]}]
        base_orbits = _edge_orbits(base, stab, base.edges)
        anchor_roles = tuple(orb[0] for orb in base_orbits)
        templates.append(ClosureTemplate(base, f, anchor_roles))
    p._templates = templates
    return templates
