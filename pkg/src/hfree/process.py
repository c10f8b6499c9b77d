"""The constrained random-edge process engine.

State is the full Edge/Open/Closed tripartition of vertex pairs, maintained
incrementally: when an edge is added, the pairs it newly closes are found by
enumerating embeddings of each closure template's base anchored at that
edge and reading off the image of the missing pair.  Uniform sampling from
the open pairs uses a dense array with a position map (O(1) draw + delete,
no rejection).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Union

from .graphs import (SimpleGraph, pair_count, pair_from_index, pair_index,
                     pair_row_offsets)
from .patterns import Pattern, closure_templates, validate_as_constraint
from .theory import Rational, step_horizon

OPEN, EDGE, CLOSED = 0, 1, 2
CLASS_NAMES = {OPEN: "open", EDGE: "edge", CLOSED: "closed"}

RNG_ID = "python-random-mt19937"


# ── stop rules ───────────────────────────────────────────────────────────

@dataclass(frozen=True)
class StepCount:
    """Run until the state has this many edges (absolute step count)."""
    steps: int


@dataclass(frozen=True)
class Horizon:
    """Run for the tracked-phase step horizon computed from (n, mu)."""
    mu: Optional[Rational] = None


@dataclass(frozen=True)
class Exhaustion:
    """Run until no open pair remains (maximal constraint-free graph)."""


StopRule = Union[StepCount, Horizon, Exhaustion]


class ProcessState:
    """Process state after some number of steps; confined to one worker."""

    def __init__(self, n: int, pattern: Pattern, seed: int):
        validate_as_constraint(pattern)
        if n < pattern.n:
            raise ValueError(f"n={n} smaller than the forbidden graph ({pattern.n} vertices)")
        self.n = n
        self.pattern = pattern
        self.seed = seed
        self.rng = random.Random(seed)
        self.graph = SimpleGraph(n)
        npairs = pair_count(n)
        self.classes = bytearray(npairs)  # all OPEN
        self.open_list = list(range(npairs))
        self.open_pos = list(range(npairs))
        self.step = 0
        self.history: list[tuple[int, int, int]] = []
        self.stopped_early = False
        self._templates = closure_templates(pattern)
        self._off = pair_row_offsets(n)

    # -- bookkeeping ------------------------------------------------------

    def pair_id(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        return self._off[u] + v - u - 1

    def class_of(self, u: int, v: int) -> int:
        return self.classes[self.pair_id(u, v)]

    def open_count(self) -> int:
        return len(self.open_list)

    def closed_count(self) -> int:
        return pair_count(self.n) - self.step - len(self.open_list)

    def is_exhausted(self) -> bool:
        return not self.open_list

    def open_pair_ids(self) -> list[int]:
        return list(self.open_list)

    def _remove_open(self, pid: int) -> None:
        i = self.open_pos[pid]
        last = self.open_list[-1]
        self.open_list[i] = last
        self.open_pos[last] = i
        self.open_list.pop()
        self.open_pos[pid] = -1

    # -- the step ---------------------------------------------------------

    def _closure_scan(self, graph: SimpleGraph, x: int, y: int) -> set[int]:
        """Pair ids of currently-open pairs that some template base
        embedding anchored at the host edge (x, y) of ``graph`` would
        close.  ``graph`` must contain the edge (x, y)."""
        adj = graph.adj
        classes = self.classes
        off = self._off
        full = (1 << graph.n) - 1
        out: set[int] = set()
        for tmpl in self._templates:
            for plan, (mp0, mp1) in tmpl._plans:
                n_pos = len(plan)
                img = [0] * n_pos
                for hx, hy in ((x, y), (y, x)):
                    img[0] = hx
                    img[1] = hy

                    def rec(i: int, used: int) -> None:
                        if i == n_pos:
                            a, b = img[mp0], img[mp1]
                            if a > b:
                                a, b = b, a
                            pid = off[a] + b - a - 1
                            if classes[pid] == OPEN:
                                out.add(pid)
                            return
                        cand = full
                        for pp in plan[i][1]:
                            cand &= adj[img[pp]]
                        cand &= ~used
                        while cand:
                            lsb = cand & -cand
                            w = lsb.bit_length() - 1
                            cand ^= lsb
                            img[i] = w
                            rec(i + 1, used | lsb)

                    rec(2, (1 << hx) | (1 << hy))
        return out


def init_process(n: int, pattern: Pattern, seed: int) -> ProcessState:
    """Fresh state: empty graph, every pair open (no pair can be closed in
    the empty graph since the forbidden graph has at least 3 edges)."""
    return ProcessState(n, pattern, seed)


def newly_closed_after(state: ProcessState, e: tuple[int, int]) -> set[int]:
    """Pair ids that moved Open -> Closed because of the edge ``e`` that
    was just added to the state's graph (exact set)."""
    x, y = e
    if not state.graph.has_edge(x, y):
        raise ValueError(f"({x},{y}) is not an edge of the current graph")
    return state._closure_scan(state.graph, x, y)


def step(state: ProcessState) -> tuple[int, int]:
    """Add one uniformly random open pair as an edge; update the
    classification; return the chosen pair."""
    if not state.open_list:
        raise RuntimeError("process exhausted: no open pair remains")
    j = state.rng.randrange(len(state.open_list))
    pid = state.open_list[j]
    state._remove_open(pid)
    state.classes[pid] = EDGE
    u, v = pair_from_index(pid, state.n)
    state.graph.add_edge(u, v)
    state.step += 1
    newly = state._closure_scan(state.graph, u, v)
    for q in sorted(newly):
        state.classes[q] = CLOSED
        state._remove_open(q)
    state.history.append((state.step, pid, len(newly)))
    return (u, v)


def _stop_target(state: ProcessState, stop: StopRule) -> Optional[int]:
    if isinstance(stop, StepCount):
        if stop.steps < 0:
            raise ValueError("step count must be >= 0")
        return stop.steps
    if isinstance(stop, Horizon):
        mu = stop.mu
        if mu is None:
            from .theory import default_eps_mu
            mu = default_eps_mu(state.pattern)[1]
        return step_horizon(state.n, state.pattern, mu)
    if isinstance(stop, Exhaustion):
        return None
    raise TypeError(f"unknown stop rule {stop!r}")


def iter_process(state: ProcessState, stop: StopRule) -> Iterator[ProcessState]:
    """Advance the state one step at a time, yielding it after each step,
    until the stop rule or exhaustion."""
    target = _stop_target(state, stop)
    while state.open_list and (target is None or state.step < target):
        step(state)
        yield state
    state.stopped_early = target is not None and state.step < target


def run_until(state: ProcessState, stop: StopRule,
              checkpoints: Iterable[int] = (),
              on_checkpoint: Optional[Callable[[ProcessState], None]] = None,
              ) -> ProcessState:
    """Advance until the stop rule or exhaustion.  If a requested step count
    exceeds the process lifetime the exhausted state is returned with
    ``stopped_early`` set instead of raising."""
    marks = set(checkpoints)
    if on_checkpoint is not None and state.step in marks:
        on_checkpoint(state)
    for st in iter_process(state, stop):
        if on_checkpoint is not None and st.step in marks:
            on_checkpoint(st)
    return state


# ── on-demand co-closure sets ────────────────────────────────────────────

def compute_C_uv(state: ProcessState, uv: tuple[int, int]) -> set[int]:
    """Exact set of open pair ids xy such that adding both uv and xy would
    create a forbidden copy using both.  Computed by running the closure
    scan on a scratch copy with uv added."""
    u, v = uv
    pid = state.pair_id(u, v)
    if state.classes[pid] != OPEN:
        raise ValueError(f"pair ({u},{v}) is {CLASS_NAMES[state.classes[pid]]}, not open")
    scratch = state.graph.copy()
    scratch.add_edge(u, v)
    return state._closure_scan(scratch, u, v)


@dataclass(frozen=True)
class EdgeSetF:
    """A set of vertex pairs (by pair id) within an optional vertex set."""

    pairs: frozenset[int]
    vertices: Optional[tuple[int, ...]] = None

    @classmethod
    def from_vertex_pairs(cls, pairs: Iterable[tuple[int, int]], n: int,
                          vertices: Optional[Iterable[int]] = None) -> "EdgeSetF":
        pids = frozenset(pair_index(u, v, n) for u, v in pairs)
        verts = tuple(sorted(vertices)) if vertices is not None else None
        return cls(pairs=pids, vertices=verts)

    @classmethod
    def random_in_vertex_set(cls, vertices: Iterable[int], count: int,
                             n: int, rng: random.Random) -> "EdgeSetF":
        verts = sorted(set(vertices))
        all_pairs = [(u, v) for i, u in enumerate(verts) for v in verts[i + 1:]]
        if count > len(all_pairs):
            raise ValueError(f"cannot pick {count} pairs inside {len(verts)} vertices")
        chosen = rng.sample(all_pairs, count)
        return cls.from_vertex_pairs(chosen, n, vertices=verts)

    @classmethod
    def scaled(cls, vertices: Iterable[int], c: float, n: int,
                     rng: random.Random) -> "EdgeSetF":
        """|F| = ceil(c * |A|) random pairs inside A; rejects infeasible c."""
        verts = sorted(set(vertices))
        a = len(verts)
        want = math.ceil(c * a)
        if want > a * (a - 1) // 2:
            raise ValueError(
                f"ceil(c*|A|) = {want} exceeds the {a * (a - 1) // 2} pairs in A")
        return cls.random_in_vertex_set(verts, want, n, rng)

    def vertex_span(self, n: int) -> tuple[int, ...]:
        if self.vertices is not None:
            return self.vertices
        touched = set()
        for pid in self.pairs:
            u, v = pair_from_index(pid, n)
            touched.add(u)
            touched.add(v)
        return tuple(sorted(touched))


def compute_O_F(state: ProcessState, f: Union[EdgeSetF, Iterable[int]]) -> set[int]:
    """Union of compute_C_uv over the pairs of F that are currently open:
    the open pairs whose selection as the next edge would close at least
    one pair of F."""
    pids = f.pairs if isinstance(f, EdgeSetF) else f
    out: set[int] = set()
    for pid in pids:
        if state.classes[pid] == OPEN:
            out |= compute_C_uv(state, pair_from_index(pid, state.n))
    return out
