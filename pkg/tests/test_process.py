import random
from collections import Counter

import pytest

from hfree.graphs import pair_count, pair_from_index
from hfree.oracle import naive_C_uv, naive_closed_set, naive_is_maximal_free
from hfree.patterns import contains_copy, parse_pattern
from hfree.process import (CLOSED, EDGE, OPEN, EdgeSetF, Exhaustion, Horizon,
                           StepCount, compute_C_uv, compute_O_F, init_process,
                           newly_closed_after, run_until, step)

C3 = parse_pattern("C3")
C5 = parse_pattern("C5")


def closed_pids(state):
    return {pid for pid, c in enumerate(state.classes) if c == CLOSED}


def test_init_all_open():
    st = init_process(10, C3, 0)
    assert st.open_count() == 45
    assert st.graph.edge_count == 0 and st.step == 0
    assert init_process(3, C3, 0).open_count() == 3


def test_init_rejections():
    with pytest.raises(ValueError):
        init_process(2, C3, 0)       # n below the pattern size
    with pytest.raises(ValueError):
        init_process(10, parse_pattern("edges: 1-2,2-3,1-3,3-4"), 0)


def test_same_seed_identical():
    a = init_process(12, C3, 5)
    b = init_process(12, C3, 5)
    run_until(a, Exhaustion())
    run_until(b, Exhaustion())
    assert a.history == b.history
    assert list(a.graph.edges()) == list(b.graph.edges())


def test_n3_terminates_after_two_steps():
    st = init_process(3, C3, 1)
    step(st)
    step(st)
    assert st.is_exhausted()
    assert st.graph.edge_count == 2
    assert st.closed_count() == 1


def test_n4_all_seeds_maximal_triangle_free():
    for seed in range(100):
        st = init_process(4, C3, seed)
        run_until(st, Exhaustion())
        assert naive_is_maximal_free(st.graph, C3), seed


def test_first_step_uniformity():
    # over many seeds, each of the 6 pairs at n=4 is drawn nearly 1/6 of the time
    counts = Counter()
    draws = 60000
    for seed in range(draws):
        st = init_process(4, C3, seed)
        counts[step(st)] += 1
    assert len(counts) == 6
    for pair, c in counts.items():
        assert abs(c / draws - 1 / 6) <= 0.01, (pair, c)


def test_newly_closed_path():
    st = init_process(3, C3, 0)
    st.graph.add_edge(0, 1)
    st.classes[st.pair_id(0, 1)] = EDGE
    st._remove_open(st.pair_id(0, 1))
    st.graph.add_edge(1, 2)
    st.classes[st.pair_id(1, 2)] = EDGE
    st._remove_open(st.pair_id(1, 2))
    assert newly_closed_after(st, (1, 2)) == {st.pair_id(0, 2)}


def test_newly_closed_first_edge_empty():
    st = init_process(6, C3, 0)
    pair = step(st)
    assert st.history[-1][2] == 0  # nothing closes after the first edge
    assert newly_closed_after(st, pair) == set()


def test_newly_closed_c5_path():
    st = init_process(5, C5, 0)
    for (u, v) in [(0, 1), (1, 2), (2, 3)]:
        pid = st.pair_id(u, v)
        st.classes[pid] = EDGE
        st._remove_open(pid)
        st.graph.add_edge(u, v)
    st.graph.add_edge(3, 4)
    st.classes[st.pair_id(3, 4)] = EDGE
    st._remove_open(st.pair_id(3, 4))
    assert newly_closed_after(st, (3, 4)) == {st.pair_id(0, 4)}


@pytest.mark.parametrize("spec,n,seed", [("C3", 12, 0), ("C4", 12, 1),
                                         ("C5", 10, 2), ("K4", 10, 3)])
def test_incremental_classes_match_oracle(spec, n, seed):
    pattern = parse_pattern(spec)
    st = init_process(n, pattern, seed)
    while not st.is_exhausted():
        step(st)
        assert closed_pids(st) == naive_closed_set(st.graph, pattern)
        # partition invariant
        counts = Counter(st.classes)
        assert counts[EDGE] == st.step
        assert counts[OPEN] + counts[EDGE] + counts[CLOSED] == pair_count(n)
        assert not contains_copy(pattern, st.graph)
    assert naive_is_maximal_free(st.graph, pattern)


def test_closed_monotone_along_run():
    st = init_process(14, C3, 9)
    prev = set()
    while not st.is_exhausted():
        step(st)
        cur = closed_pids(st)
        assert prev <= cur
        prev = cur


def test_closure_trigger():
    # a pair closes at the next step iff the chosen edge is in its co-closure set
    rng = random.Random(4)
    st = init_process(12, C3, 4)
    for _ in range(10):
        pool = st.open_pair_ids()
        probes = rng.sample(pool, min(4, len(pool)))
        cuv = {pid: compute_C_uv(st, pair_from_index(pid, st.n)) for pid in probes}
        chosen = step(st)
        chosen_pid = st.pair_id(*chosen)
        for pid, cset in cuv.items():
            if pid == chosen_pid:
                continue
            if chosen_pid in cset:
                assert st.classes[pid] == CLOSED
            else:
                assert st.classes[pid] != CLOSED
        if st.is_exhausted():
            break


def test_compute_C_uv_examples():
    st = init_process(4, C3, 0)
    pid01 = st.pair_id(0, 1)
    st.classes[pid01] = EDGE
    st._remove_open(pid01)
    st.graph.add_edge(0, 1)
    assert compute_C_uv(st, (0, 2)) == {st.pair_id(1, 2)}
    fresh = init_process(5, C3, 0)
    assert compute_C_uv(fresh, (0, 3)) == set()
    with pytest.raises(ValueError):
        compute_C_uv(st, (0, 1))  # an edge, not open


def test_compute_C_uv_matches_oracle_and_symmetry():
    for seed in range(6):
        st = init_process(9, C3, seed)
        for _ in range(5):
            if st.is_exhausted():
                break
            step(st)
        rng = random.Random(seed)
        pool = st.open_pair_ids()
        for pid in rng.sample(pool, min(4, len(pool))):
            uv = pair_from_index(pid, st.n)
            got = compute_C_uv(st, uv)
            assert got == naive_C_uv(st.graph, C3, uv)
            for xy_pid in got:
                xy = pair_from_index(xy_pid, st.n)
                assert pid in compute_C_uv(st, xy)


def test_compute_O_F():
    st = init_process(5, C3, 0)
    for (u, v) in [(0, 1), (2, 3)]:
        pid = st.pair_id(u, v)
        st.classes[pid] = EDGE
        st._remove_open(pid)
        st.graph.add_edge(u, v)
    f = EdgeSetF.from_vertex_pairs([(0, 2), (1, 3)], 5)
    want = compute_C_uv(st, (0, 2)) | compute_C_uv(st, (1, 3))
    assert compute_O_F(st, f) == want
    assert want  # this instance genuinely closes something
    # union of one set
    f1 = EdgeSetF.from_vertex_pairs([(0, 2)], 5)
    assert compute_O_F(st, f1) == compute_C_uv(st, (0, 2))
    # F with no open pairs
    f_edges = EdgeSetF.from_vertex_pairs([(0, 1), (2, 3)], 5)
    assert compute_O_F(st, f_edges) == set()


def test_run_until_step_count():
    st = init_process(10, C3, 0)
    run_until(st, StepCount(0))
    assert st.step == 0
    run_until(st, StepCount(5))
    assert st.step == 5
    # overshooting a terminated process flags instead of raising
    run_until(st, StepCount(10**6))
    assert st.is_exhausted() and st.stopped_early


def test_run_until_horizon():
    st = init_process(100, C3, 3)
    run_until(st, Horizon(mu="0.01"))
    assert st.step == 21  # floor(0.01 * 100^2 * 0.1 * sqrt(ln 100))


def test_iter_process_checkpoints():
    st = init_process(12, C3, 0)
    seen = []
    run_until(st, StepCount(8), checkpoints=[2, 5, 8],
              on_checkpoint=lambda s: seen.append(s.step))
    assert seen == [2, 5, 8]


def test_history_records():
    st = init_process(8, C3, 2)
    run_until(st, StepCount(4))
    assert [h[0] for h in st.history] == [1, 2, 3, 4]
    for _, pid, closed in st.history:
        assert 0 <= pid < pair_count(8)
        assert closed >= 0


def test_edge_set_f_constructors():
    rng = random.Random(0)
    f = EdgeSetF.random_in_vertex_set([1, 3, 5, 7], 4, 10, rng)
    assert len(f.pairs) == 4
    assert f.vertex_span(10) == (1, 3, 5, 7)
    with pytest.raises(ValueError):
        EdgeSetF.random_in_vertex_set([1, 2, 3], 4, 10, rng)
    with pytest.raises(ValueError):
        EdgeSetF.scaled([1, 2, 3, 4], 100.0, 10, rng)
    f2 = EdgeSetF.scaled(range(8), 1.5, 10, rng)
    assert len(f2.pairs) == 12  # ceil(1.5 * 8)
