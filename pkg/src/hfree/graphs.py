"""Simple undirected graphs on vertex set {0, ..., n-1} backed by bitsets.

Adjacency is one Python int per vertex used as a bitmask, which gives
constant-time edge tests and cheap common-neighborhood intersections
(`adj[u] & adj[v]`).  Vertices are 0-based everywhere in code; text formats
and logs present them 1-based.
"""

from __future__ import annotations

from typing import Iterable, Iterator, TextIO


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        lsb = mask & -mask
        yield lsb.bit_length() - 1
        mask ^= lsb


class SimpleGraph:
    """Mutable simple graph; supports edge insertion only (no deletion)."""

    __slots__ = ("n", "adj", "edge_count")

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"vertex count must be >= 1, got {n}")
        self.n = n
        self.adj = [0] * n
        self.edge_count = 0

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range [0, {self.n})")

    def has_edge(self, u: int, v: int) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        return bool((self.adj[u] >> v) & 1)

    def add_edge(self, u: int, v: int) -> None:
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise ValueError(f"loop edge ({u},{v}) rejected")
        if (self.adj[u] >> v) & 1:
            raise ValueError(f"duplicate edge ({u},{v}) rejected")
        self.adj[u] |= 1 << v
        self.adj[v] |= 1 << u
        self.edge_count += 1

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return self.adj[v].bit_count()

    @property
    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adj]

    def neighbors(self, v: int) -> Iterator[int]:
        self._check_vertex(v)
        return iter_bits(self.adj[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        """All edges as (u, v) with u < v, in lexicographic order."""
        for u in range(self.n):
            mask = self.adj[u] >> (u + 1)
            while mask:
                lsb = mask & -mask
                yield (u, u + 1 + lsb.bit_length() - 1)
                mask ^= lsb

    def induced_edge_count(self, vertices: Iterable[int]) -> int:
        """e(A): number of edges with both endpoints in A."""
        mask = 0
        for v in vertices:
            self._check_vertex(v)
            mask |= 1 << v
        total = 0
        m = mask
        while m:
            lsb = m & -m
            total += (self.adj[lsb.bit_length() - 1] & mask).bit_count()
            m ^= lsb
        return total // 2

    def copy(self) -> "SimpleGraph":
        g = SimpleGraph.__new__(SimpleGraph)
        g.n = self.n
        g.adj = self.adj[:]
        g.edge_count = self.edge_count
        return g

    def __repr__(self) -> str:
        return f"SimpleGraph(n={self.n}, edges={self.edge_count})"


# ── unordered pair indexing ─────────────────────────────────────────────

def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(u: int, v: int, n: int) -> int:
    """Canonical index of the unordered pair {u,v} in [0, n(n-1)/2)."""
    if u == v:
        raise ValueError(f"pair must have distinct vertices, got ({u},{v})")
    if u > v:
        u, v = v, u
    if u < 0 or v >= n:
        raise ValueError(f"pair ({u},{v}) out of range for n={n}")
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def pair_from_index(pid: int, n: int) -> tuple[int, int]:
    """Inverse of pair_index; returns (u, v) with u < v."""
    if not 0 <= pid < pair_count(n):
        raise ValueError(f"pair id {pid} out of range for n={n}")
    u = 0
    # row u covers ids [off(u), off(u) + n-1-u)
    while pid >= n - 1 - u:
        pid -= n - 1 - u
        u += 1
    return (u, u + 1 + pid)


def pair_row_offsets(n: int) -> list[int]:
    """off[u] such that pair_index(u, v, n) = off[u] + v - u - 1 for u < v."""
    return [u * (2 * n - u - 1) // 2 for u in range(n)]


def all_pairs_decoded(n: int) -> list[tuple[int, int]]:
    """Lookup table pid -> (u, v); handy for hot loops."""
    out = []
    for u in range(n):
        for v in range(u + 1, n):
            out.append((u, v))
    return out


# ── edge-list text format ───────────────────────────────────────────────
# One edge per line, "u v" 1-based; '#'-prefixed comment lines ignored.
# Writers emit a "# n = <count>" comment so graphs with trailing isolated
# vertices survive a round trip; readers fall back to the max vertex label.

def write_edge_list(g: SimpleGraph, fh: TextIO) -> None:
    fh.write(f"# n = {g.n}\n")
    for u, v in g.edges():
        fh.write(f"{u + 1} {v + 1}\n")


def read_edge_list(fh: TextIO) -> SimpleGraph:
    edges: list[tuple[int, int]] = []
    n_hint = 0
    max_label = 0
    for line in fh:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].replace("=", " ").split()
            if len(body) == 2 and body[0] == "n" and body[1].isdigit():
                n_hint = int(body[1])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"malformed edge line: {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if u < 1 or v < 1:
            raise ValueError(f"vertices are 1-based, got {line!r}")
        edges.append((u - 1, v - 1))
        max_label = max(max_label, u, v)
    n = max(n_hint, max_label, 1)
    g = SimpleGraph(n)
    for u, v in edges:
        g.add_edge(u, v)
    return g
