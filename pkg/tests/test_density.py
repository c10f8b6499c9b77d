import itertools
from fractions import Fraction

import pytest

from hfree.density import (SearchBudgetExceeded, bounded_density_scan,
                           exact_bounded_scan, is_triangle_free,
                           local_search_density, verify_density_bound)
from hfree.graphs import SimpleGraph
from hfree.oracle import naive_max_density
from hfree.patterns import Pattern, parse_pattern
from hfree.process import Exhaustion, init_process, run_until
from hfree.theory import Constants

from conftest import PETERSEN_EDGES, random_graph, random_triangle_free


def brute_best_density(g, k):
    best = Fraction(0)
    for size in range(1, min(k, g.n) + 1):
        for sub in itertools.combinations(range(g.n), size):
            d = Fraction(g.induced_edge_count(sub), size)
            if d > best:
                best = d
    return best


def test_examples():
    k4 = parse_pattern("K4").to_graph()
    rep = bounded_density_scan(k4, 4)
    assert rep.density == Fraction(3, 2) and rep.witness == (0, 1, 2, 3)
    assert rep.optimal
    assert bounded_density_scan(parse_pattern("C5").to_graph(), 5).density == 1
    pet = Pattern(10, PETERSEN_EDGES).to_graph()
    rep = bounded_density_scan(pet, 10)
    assert rep.density == Fraction(3, 2)
    assert rep.density == naive_max_density(pet)[0]
    assert bounded_density_scan(parse_pattern("K12").to_graph(), 12).density == Fraction(11, 2)


def test_triangle_free_detection():
    assert is_triangle_free(parse_pattern("C5").to_graph())
    assert not is_triangle_free(parse_pattern("K4").to_graph())


@pytest.mark.parametrize("seed", range(25))
def test_exact_scan_matches_brute_force(seed):
    import random
    rng = random.Random(seed)
    n = rng.randint(4, 11)
    if seed % 3 == 0:
        g = random_triangle_free(n, rng.randint(n, 4 * n), seed)
    else:
        g = random_graph(n, rng.choice([0.2, 0.4, 0.6]), seed)
    for k in (min(n, 12), 5):
        rep = exact_bounded_scan(g, k)
        assert rep.density == brute_best_density(g, k), (seed, n, k)
        assert g.induced_edge_count(rep.witness) == rep.density * len(rep.witness)


def test_max_edges_by_size_monotone():
    g = random_triangle_free(20, 60, 3)
    rep = exact_bounded_scan(g, 10)
    vals = [rep.max_edges_by_size[s] for s in sorted(rep.max_edges_by_size)]
    assert vals == sorted(vals)


def test_heuristic_is_lower_bound():
    for seed in range(10):
        g = random_graph(10, 0.5, seed + 100)
        exact = bounded_density_scan(g, 10, mode="exact")
        heur = bounded_density_scan(g, 10, mode="heuristic")
        assert heur.density <= exact.density
        assert not heur.optimal
        assert g.induced_edge_count(heur.witness) == heur.density * len(heur.witness)


def test_scan_argument_validation():
    g = random_graph(8, 0.4, 0)
    with pytest.raises(ValueError):
        bounded_density_scan(g, 0)
    with pytest.raises(ValueError):
        bounded_density_scan(g, 13, mode="exact")
    with pytest.raises(ValueError):
        bounded_density_scan(g, 5, mode="banana")
    # heuristic mode has no cap limit
    assert bounded_density_scan(g, 30, mode="heuristic").density >= 0


def test_budget_exhaustion_raises():
    g = random_graph(40, 0.5, 7)
    with pytest.raises(SearchBudgetExceeded):
        exact_bounded_scan(g, 10, node_budget=10)


def test_local_search_density_empty_graph():
    dens, wit = local_search_density(SimpleGraph(4), 4)
    assert dens == 0 and len(wit) >= 1


def test_scan_on_process_graph_small():
    c3 = parse_pattern("C3")
    st = init_process(60, c3, 0)
    run_until(st, Exhaustion())
    rep = exact_bounded_scan(st.graph, 10)
    assert rep.optimal
    assert rep.density == Fraction(5, 2)  # ceiling pocket present at this scale


def test_verify_density_bound_derived_mode_vacuous():
    c3 = parse_pattern("C3")
    consts = Constants.for_run(c3, 800)
    g = random_triangle_free(50, 300, 1)
    report = verify_density_bound(g, consts)
    assert report.mode == "derived"
    assert report.passed and report.vacuous
    assert report.size_limit == 1


def test_verify_density_bound_empirical():
    c3 = parse_pattern("C3")
    consts = Constants.for_run(c3, 100)
    k12 = parse_pattern("K12").to_graph()
    report = verify_density_bound(k12, consts, override=(2.0, 12))
    assert report.mode == "empirical" and not report.passed
    assert report.scan.density == Fraction(11, 2)
    st = init_process(60, c3, 2)
    run_until(st, Exhaustion())
    ok = verify_density_bound(st.graph, consts, override=(3.0, 10))
    assert ok.passed and not ok.vacuous


def test_report_row_shape():
    rep = bounded_density_scan(parse_pattern("K4").to_graph(), 4)
    row = rep.as_row()
    assert row["density"] == "3/2" and row["optimal"] == 1
    assert row["witness"] == "1 2 3 4"  # 1-based in output
