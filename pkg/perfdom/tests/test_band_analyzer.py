# tests/test_band_analyzer.py
from fractions import Fraction

import networkx as nx
import pytest

from perfdom.band_analyzer import (
    BandOutcome,
    BandSide,
    RowMode,
    TransitionGraph,
    boundary_strip_search,
    build_transition_graph,
    classify_infinite_boards,
    classify_one_sided,
    classify_two_sided,
    min_mean_cycle,
    tile_cycle,
)
from perfdom.board import BoardDims, knight_neighbors
from perfdom.errors import BoardInputError, ResourceGuardError
from perfdom.exact_solver import FrontierState, cache_clear, solve_gamma_p


@pytest.fixture(scope="module")
def graphs():
    # band graphs for the nontrivial heights, built once per module
    return {m: build_transition_graph(m) for m in (2, 3, 4)}


def setup_function():
    cache_clear()


def _interior_is_perfect(placement, margin=2):
    # squares whose whole knight neighbourhood lies inside the tiled window
    dims = placement.dims
    for sq in dims.squares():
        if sq.col <= margin or sq.col > dims.cols - margin or placement.has_knight(sq):
            continue
        hits = sum(1 for u in knight_neighbors(dims, sq) if placement.has_knight(u))
        if hits != 1:
            return False
    return True


# --- transition graph ---
def test_band_height_guard():
    with pytest.raises(ResourceGuardError):
        build_transition_graph(1)
    with pytest.raises(ResourceGuardError):
        build_transition_graph(8)
    with pytest.raises(ResourceGuardError):
        build_transition_graph(5, max_band_rows=4)
    with pytest.raises(ResourceGuardError):
        build_transition_graph(3, max_states=10)


def test_row_modes_must_cover_every_row():
    with pytest.raises(BoardInputError):
        build_transition_graph(3, row_modes=[RowMode.EXACT])


def test_relaxed_rows_only_add_states(graphs):
    relaxed = build_transition_graph(3, row_modes=[RowMode.EXACT, RowMode.EXACT, RowMode.AT_MOST])
    assert set(graphs[3].graph.nodes) <= set(relaxed.graph.nodes)
    assert relaxed.exact_mask == 0b011


def test_two_row_graph_has_nontrivial_cycle(graphs):
    g = graphs[2]
    assert g.start in g.graph
    cycle = min_mean_cycle(g)
    assert cycle is not None
    assert cycle.density < 1
    assert any(col != 0b11 for col in cycle.columns)


def test_successors_follow_edges(graphs):
    g = graphs[2]
    for nxt, knights in g.successors(g.start):
        assert g.graph.has_edge(g.start, nxt)
        assert g.graph[g.start][nxt]["weight"] == bin(knights).count("1")


# --- minimum mean cycle ---
def _toy_graph():
    a = FrontierState(0b11, 0b11, 0, 0, 0, 0)
    b = FrontierState(0b01, 0b10, 0, 0, 0, 0)
    c = FrontierState(0b10, 0b01, 0, 0, 0, 0)
    g = nx.DiGraph()
    g.add_edge(a, a, knights=0b11, weight=2)
    g.add_edge(b, c, knights=0b01, weight=1)
    g.add_edge(c, b, knights=0b00, weight=0)
    g.add_edge(a, b, knights=0b10, weight=1)
    return TransitionGraph(2, 0b11, g), a, b, c


def test_self_loop_mean():
    tg, a, b, c = _toy_graph()
    only_a = min_mean_cycle(tg, restrict=lambda s: s == a)
    assert only_a.mean_weight == 2
    assert only_a.density == 1
    assert only_a.columns == [0b11]


def test_least_mean_cycle_wins():
    tg, a, b, c = _toy_graph()
    best = min_mean_cycle(tg)
    assert best.mean_weight == Fraction(1, 2)
    assert best.density == Fraction(1, 4)
    # rotation starting at the smallest column sequence
    assert best.columns == [0b01, 0b10]
    assert set(best.states) == {b, c}


def test_no_cycle_under_restriction():
    tg, a, b, c = _toy_graph()
    assert min_mean_cycle(tg, restrict=lambda s: s == b) is None


# --- classification ---
@pytest.mark.parametrize("m,density", [(2, Fraction(1, 3)), (4, Fraction(1, 2))])
def test_two_sided_densities(graphs, m, density):
    res = classify_two_sided(m, graph=graphs[m])
    assert res.outcome is BandOutcome.NONTRIVIAL
    assert res.side is BandSide.TWO_SIDED
    assert res.min_density == density
    assert not res.transient_only


@pytest.mark.parametrize("m,density", [(2, Fraction(1, 3)), (4, Fraction(1, 2))])
def test_one_sided_densities(graphs, m, density):
    res = classify_one_sided(m, graph=graphs[m])
    assert res.nontrivial
    assert res.min_density == density


def test_one_sided_four_rows_uses_period_four_columns(graphs):
    res = classify_one_sided(4, graph=graphs[4])
    # rows {1,3} and {2,4}
    assert set(res.witness_cycle) <= {0b0101, 0b1010}


def test_three_rows_within_bound(graphs):
    two = classify_two_sided(3, graph=graphs[3])
    one = classify_one_sided(3, graph=graphs[3])
    assert two.nontrivial and one.nontrivial
    assert two.min_density <= Fraction(5, 12)
    assert two.min_density <= one.min_density


def test_two_sided_never_denser_than_one_sided(graphs):
    for m, g in graphs.items():
        assert classify_two_sided(m, graph=g).min_density <= classify_one_sided(m, graph=g).min_density


@pytest.mark.parametrize("m", [2, 3, 4])
def test_tiled_witness_cycle_is_perfect_inside(graphs, m):
    res = classify_two_sided(m, graph=graphs[m])
    tiled = tile_cycle(res, 3)
    assert tiled.dims == BoardDims(cols=3 * len(res.witness_cycle), rows=m)
    assert _interior_is_perfect(tiled)
    assert Fraction(tiled.size, tiled.dims.cells) == res.min_density


def test_finite_optima_approach_band_density():
    # 2 rows: 4*ceil(n/6) knights, off by at most 2/n from 1/3
    d2 = classify_two_sided(2).min_density
    for n in range(6, 41, 2):
        assert abs(Fraction(solve_gamma_p(BoardDims(cols=n, rows=2)).gamma_p, 2 * n) - d2) <= Fraction(2, n)
    # 4 rows: even widths from 14 on sit exactly at 1/2
    d4 = classify_two_sided(4).min_density
    for n in range(14, 41, 2):
        assert Fraction(solve_gamma_p(BoardDims(cols=n, rows=4)).gamma_p, 4 * n) == d4


def test_three_row_optima_against_band_density(graphs):
    d3 = classify_two_sided(3, graph=graphs[3]).min_density
    assert d3 == Fraction(1, 3)
    gamma = {n: solve_gamma_p(BoardDims(cols=n, rows=3)).gamma_p for n in range(2, 41)}
    for n, g in gamma.items():
        assert Fraction(g, 3 * n) >= d3
    # widths 3 mod 8 admit only the full board
    for n in (11, 19, 27, 35):
        assert gamma[n] == 3 * n
    # not monotone in n, but along widths 8k the excess over n stays bounded
    assert [gamma[n] - n for n in (24, 32, 40)] == [6, 2, 2]
    assert Fraction(gamma[40], 120) - d3 == Fraction(2, 120)


def test_classification_json(graphs):
    payload = classify_two_sided(2, graph=graphs[2]).to_json()
    assert payload["format_version"] == 1
    assert payload["outcome"] == "nontrivial"
    assert payload["min_density"] == "1/3"
    assert payload["side"] == "two-sided"


def test_tile_needs_a_cycle():
    res = classify_two_sided(2)
    trivial = res.model_copy(update={"witness_cycle": [], "outcome": BandOutcome.ONLY_TRIVIAL})
    with pytest.raises(BoardInputError):
        tile_cycle(trivial, 2)


@pytest.mark.slow
def test_five_rows_only_trivial():
    g = build_transition_graph(5)
    two = classify_two_sided(5, graph=g)
    one = classify_one_sided(5, graph=g)
    assert two.outcome is BandOutcome.ONLY_TRIVIAL
    assert one.outcome is BandOutcome.ONLY_TRIVIAL
    assert two.min_density is None


@pytest.mark.slow
@pytest.mark.parametrize("m", [6, 7])
def test_tall_bands_only_trivial(m):
    g = build_transition_graph(m)
    assert not classify_two_sided(m, graph=g).nontrivial
    assert not classify_one_sided(m, graph=g).nontrivial


# --- boundary strip ---
def test_strip_alive_at_start_depth():
    outcome = boundary_strip_search(4)
    assert not outcome.all_dead
    assert outcome.survivors_by_k[4] > 0
    w = outcome.witness
    assert w.dims == BoardDims(cols=8, rows=5)
    # some strip square in rows 1..3 stays empty
    assert any(not w.has_knight((c, r)) for c in range(3, 7) for r in range(1, 4))
    assert outcome.to_json()["verdict"] == "alive"


def test_strip_depth_guard():
    with pytest.raises(BoardInputError):
        boundary_strip_search(3)


@pytest.mark.slow
def test_strip_dies_by_twelve():
    outcome = boundary_strip_search(12)
    assert outcome.all_dead
    assert outcome.k <= 12
    assert outcome.survivors_by_k[outcome.k] == 0
    # every shallower depth still had survivors
    assert all(v > 0 for k, v in outcome.survivors_by_k.items() if k < outcome.k)


# --- infinite-board report ---
def test_infinite_report_with_small_limits():
    entries = {e.board: e for e in classify_infinite_boards(max_band_rows=4, strip_k_max=4)}
    assert entries["KN_{Z,Z}"].density == Fraction(1, 8)
    assert entries["KN_{Z,Z}"].outcome == "nontrivial"
    assert "radius 6: unsat" in entries["KN_{Z,Z}"].evidence
    assert entries["KN_{N,3}"].outcome == "nontrivial"
    assert entries["KN_{Z,2}"].density == Fraction(1, 3)
    assert entries["KN_{Z,5}"].outcome == "inconclusive"
    # the strip is still alive at depth 4, so the quadrants stay open
    assert entries["KN_{Z,N}"].outcome == "inconclusive"


@pytest.mark.slow
def test_infinite_report_full():
    entries = {e.board: e for e in classify_infinite_boards(strip_k_max=12)}
    assert entries["KN_{Z,N}"].outcome == "only-trivial"
    assert entries["KN_{N,N}"].outcome == "only-trivial"
    for m in (5, 6, 7):
        assert entries[f"KN_{{Z,{m}}}"].outcome == "only-trivial"
