# band_analyzer.py
"""Nontrivial perfect dominating sets on infinite bands KN_{Z,m} and KN_{N,m}.

A band placement is a walk in the transition graph of the column sweep: nodes
are frontier states, an edge appends one column of knights and is weighted by
its knight count. Bi-infinite walks (two-sided bands) live between cycles;
one-sided walks start at the blank state of two virtual empty columns. The
minimum asymptotic density is a minimum mean cycle, computed exactly.
"""
from __future__ import annotations

import logging
import time
from collections import deque
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, field_serializer

from perfdom.board import BoardDims, Placement
from perfdom.config import load_settings
from perfdom.errors import BoardInputError, ResourceGuardError
from perfdom.exact_solver import (
    BLANK_STATE,
    VIRTUAL_COLUMN,
    ColumnSpec,
    FrontierState,
    advance,
    column_options,
)

logger = logging.getLogger("perfdom.band_analyzer")

DEFAULT_MAX_STATES = 5_000_000


class RowMode(str, Enum):
    EXACT = "exact"
    AT_MOST = "at-most"


class BandSide(str, Enum):
    TWO_SIDED = "two-sided"
    ONE_SIDED = "one-sided"


class BandOutcome(str, Enum):
    ONLY_TRIVIAL = "only-trivial"
    NONTRIVIAL = "nontrivial"


# -------------------------
# Transition graph
# -------------------------
class TransitionGraph:
    """Weighted column-extension graph of one band height.

    Edges carry ``knights`` (the appended column) and ``weight`` (its size).
    Closure starts from every two-column knight pair with no domination
    bookkeeping yet; two steps later each state is exact, so every state of a
    bi-infinite walk is present. The pair with no knights is the blank state,
    which doubles as the left-boundary start of one-sided bands.
    """

    def __init__(self, rows: int, exact_mask: int, graph: nx.DiGraph, elapsed: float = 0.0):
        self.rows = rows
        self.exact_mask = exact_mask
        self.graph = graph
        self.start = BLANK_STATE
        self.elapsed = elapsed

    @property
    def states(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def edges(self) -> int:
        return self.graph.number_of_edges()

    def successors(self, state: FrontierState) -> Iterable[Tuple[FrontierState, int]]:
        for nxt, data in self.graph[state].items():
            yield nxt, data["knights"]

    def __repr__(self) -> str:
        return f"TransitionGraph(rows={self.rows}, states={self.states}, edges={self.edges})"


def _row_mask(rows: int, row_modes: Optional[Sequence[RowMode]]) -> int:
    if row_modes is None:
        return (1 << rows) - 1
    if len(row_modes) != rows:
        raise BoardInputError(f"Expected {rows} row modes, got {len(row_modes)}.")
    mask = 0
    for j, mode in enumerate(row_modes):
        if RowMode(mode) is RowMode.EXACT:
            mask |= 1 << j
    return mask


def build_transition_graph(
    m: int,
    row_modes: Optional[Sequence[RowMode]] = None,
    max_band_rows: Optional[int] = None,
    max_states: int = DEFAULT_MAX_STATES,
) -> TransitionGraph:
    """All consistent frontier states of an m-row band and their extensions."""
    limit = max_band_rows if max_band_rows is not None else load_settings().max_band_rows
    if m < 2 or m > limit:
        raise ResourceGuardError(f"Band height must lie in 2..{limit}, got {m}.")
    start = time.perf_counter()
    full = (1 << m) - 1
    exact = _row_mask(m, row_modes)
    spec = ColumnSpec(exact=exact)

    g = nx.DiGraph()
    queue: deque[FrontierState] = deque()
    for a in range(full + 1):
        for b in range(full + 1):
            seed = FrontierState(a, b, 0, 0, 0, 0)
            g.add_node(seed)
            queue.append(seed)
    while queue:
        state = queue.popleft()
        for knights in column_options(state, spec, full):
            nxt = advance(state, knights, spec, exact, full)
            if nxt is None:
                continue
            if nxt not in g:
                g.add_node(nxt)
                queue.append(nxt)
                if g.number_of_nodes() > max_states:
                    raise ResourceGuardError(
                        f"Band graph for m={m} exceeds {max_states} states; raise the state limit."
                    )
            g.add_edge(state, nxt, knights=knights, weight=knights.bit_count())
    graph = TransitionGraph(m, exact, g, time.perf_counter() - start)
    logger.info(
        "Built band graph m=%d: %d states, %d edges (%.2fs)",
        m, graph.states, graph.edges, graph.elapsed,
    )
    return graph


# -------------------------
# Reachability helpers
# -------------------------
def _cyclic_components(g: nx.DiGraph) -> List[Set[FrontierState]]:
    comps = []
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1:
            comps.append(comp)
        else:
            (v,) = comp
            if g.has_edge(v, v):
                comps.append(comp)
    return comps


def _closure(g: nx.DiGraph, sources: Iterable[FrontierState], reverse: bool = False) -> Set[FrontierState]:
    seen = set(sources)
    queue = deque(seen)
    step = g.predecessors if reverse else g.successors
    while queue:
        v = queue.popleft()
        for u in step(v):
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return seen


# -------------------------
# Minimum mean cycle
# -------------------------
class MeanCycle(BaseModel):
    """A directed cycle of least mean weight (knights per column)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mean_weight: Fraction
    density: Fraction
    columns: List[int]
    states: List[FrontierState]


_INF = np.int64(1) << np.int64(40)


def _relax(dist: np.ndarray, src: np.ndarray, dst: np.ndarray, w: np.ndarray) -> np.ndarray:
    out = np.full_like(dist, _INF)
    np.minimum.at(out, dst, dist[src] + w)
    return np.minimum(out, _INF)


def _karp_mean(n: int, src: np.ndarray, dst: np.ndarray, w: np.ndarray) -> Fraction:
    """Karp's minimum cycle mean of a strongly connected graph, in O(n) space.

    The walk lengths are recomputed in a second pass instead of stored.
    """
    start = np.full(n, _INF, dtype=np.int64)
    start[0] = 0
    dist = start
    for _ in range(n):
        dist = _relax(dist, src, dst, w)
    d_n = dist

    best_num = np.zeros(n, dtype=np.int64)
    best_den = np.ones(n, dtype=np.int64)
    have = np.zeros(n, dtype=bool)
    dist = start
    for k in range(n):
        ok = (dist < _INF) & (d_n < _INF)
        num = d_n - dist
        den = n - k
        better = ok & (~have | (num * best_den > best_num * den))
        best_num = np.where(better, num, best_num)
        best_den = np.where(better, den, best_den)
        have |= better
        dist = _relax(dist, src, dst, w)
    return min(Fraction(int(a), int(b)) for a, b, h in zip(best_num, best_den, have) if h)


def _tight_cycle(n: int, src: np.ndarray, dst: np.ndarray, w: np.ndarray, mean: Fraction) -> List[int]:
    # shift weights so the minimum cycle weighs zero, then take a cycle of tight edges
    shifted = w * mean.denominator - mean.numerator
    pot = np.zeros(n, dtype=np.int64)
    for _ in range(n + 1):
        cand = np.zeros(n, dtype=np.int64)
        np.minimum.at(cand, dst, pot[src] + shifted)
        nxt = np.minimum(pot, cand)
        if np.array_equal(nxt, pot):
            break
        pot = nxt
    tight = shifted + pot[src] - pot[dst] == 0
    h = nx.DiGraph()
    h.add_edges_from(zip(src[tight].tolist(), dst[tight].tolist()))
    return [u for u, _ in nx.find_cycle(h)]


def _least_rotation(cycle: List[FrontierState]) -> List[FrontierState]:
    keyed = [tuple(s.knights_cur for s in cycle[i:] + cycle[:i]) for i in range(len(cycle))]
    best = min(range(len(cycle)), key=lambda i: keyed[i])
    return cycle[best:] + cycle[:best]


def min_mean_cycle(
    g: TransitionGraph,
    restrict: Optional[Callable[[FrontierState], bool]] = None,
) -> Optional[MeanCycle]:
    """Exact minimum mean cycle over states accepted by ``restrict``.

    Returns ``None`` when no cycle survives the restriction.
    """
    nodes = [v for v in g.graph.nodes if restrict is None or restrict(v)]
    sub = g.graph.subgraph(nodes)
    best: Optional[Tuple[Fraction, Tuple[int, ...], List[FrontierState]]] = None
    for comp in _cyclic_components(sub):
        order = sorted(comp)
        index = {v: i for i, v in enumerate(order)}
        edges = [(index[u], index[v], d["weight"]) for u, v, d in sub.subgraph(order).edges(data=True)]
        src = np.array([e[0] for e in edges], dtype=np.int64)
        dst = np.array([e[1] for e in edges], dtype=np.int64)
        w = np.array([e[2] for e in edges], dtype=np.int64)
        mean = _karp_mean(len(order), src, dst, w)
        cycle = _least_rotation([order[i] for i in _tight_cycle(len(order), src, dst, w, mean)])
        # the edge into each cycle state appends that state's current column
        columns = tuple(s.knights_cur for s in cycle)
        if best is None or (mean, columns) < (best[0], best[1]):
            best = (mean, columns, cycle)
    if best is None:
        return None
    mean, columns, cycle = best
    logger.debug("Minimum mean cycle: %s knights/column over %d columns", mean, len(columns))
    return MeanCycle(mean_weight=mean, density=mean / g.rows, columns=list(columns), states=cycle)


# -------------------------
# Classification
# -------------------------
class BandClassification(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rows: int
    side: BandSide
    outcome: BandOutcome
    min_density: Optional[Fraction] = None
    witness_cycle: List[int] = []
    transient_only: bool = False
    states: int = 0

    @field_serializer("min_density")
    def _density_text(self, v: Optional[Fraction]) -> Optional[str]:
        return None if v is None else str(v)

    @property
    def nontrivial(self) -> bool:
        return self.outcome is BandOutcome.NONTRIVIAL

    def to_json(self) -> dict:
        return {"format_version": 1, **self.model_dump(mode="json")}


def _classify(g: TransitionGraph, side: BandSide, core: Set[FrontierState], cyclic: Set[FrontierState]) -> BandClassification:
    if not any(s.has_empty for s in core):
        logger.info("Band m=%d %s: only trivial", g.rows, side.value)
        return BandClassification(rows=g.rows, side=side, outcome=BandOutcome.ONLY_TRIVIAL, states=g.states)
    cycle = min_mean_cycle(g, restrict=core.__contains__)
    transient = not any(s.has_empty for s in cyclic)
    logger.info(
        "Band m=%d %s: nontrivial, density %s (period %d%s)",
        g.rows, side.value, cycle.density, len(cycle.columns), ", transient only" if transient else "",
    )
    return BandClassification(
        rows=g.rows,
        side=side,
        outcome=BandOutcome.NONTRIVIAL,
        min_density=cycle.density,
        witness_cycle=cycle.columns,
        transient_only=transient,
        states=g.states,
    )


def classify_two_sided(m: int, graph: Optional[TransitionGraph] = None, **guards) -> BandClassification:
    """KN_{Z,m}: nontrivial iff an empty square sits between two cycles."""
    g = graph or build_transition_graph(m, **guards)
    cyclic = set().union(*_cyclic_components(g.graph))
    core = _closure(g.graph, cyclic) & _closure(g.graph, cyclic, reverse=True)
    return _classify(g, BandSide.TWO_SIDED, core, cyclic)


def classify_one_sided(m: int, graph: Optional[TransitionGraph] = None, **guards) -> BandClassification:
    """KN_{N,m}: walks start at the blank left boundary and end in a cycle."""
    g = graph or build_transition_graph(m, **guards)
    reach = _closure(g.graph, [g.start])
    sub = g.graph.subgraph(reach)
    cyclic = set().union(*_cyclic_components(sub))
    core = reach & _closure(sub, cyclic, reverse=True)
    return _classify(g, BandSide.ONE_SIDED, core, cyclic)


def tile_cycle(classification: BandClassification, repeats: int) -> Placement:
    """Repeat a band's witness cycle ``repeats`` times as a finite board."""
    if not classification.witness_cycle:
        raise BoardInputError(f"Band m={classification.rows} has no witness cycle to tile.")
    columns = list(classification.witness_cycle) * repeats
    return Placement.from_columns(BoardDims(cols=len(columns), rows=classification.rows), columns)


# -------------------------
# Boundary strip of half-planes and quadrants
# -------------------------
STRIP_ROWS = 5
STRIP_EXACT = 0b00111
_OPEN_COLUMNS = 2


class StripOutcome(BaseModel):
    """AllDead(k) when no nontrivial construction spans k strip columns."""

    model_config = ConfigDict(frozen=True)

    all_dead: bool
    k: int
    survivors_by_k: Dict[int, int]
    witness: Optional[Placement] = None

    def to_json(self) -> dict:
        return {
            "format_version": 1,
            "verdict": "all-dead" if self.all_dead else "alive",
            "k": self.k,
            "survivors_by_k": {str(k): v for k, v in self.survivors_by_k.items()},
            "witness": self.witness.to_json() if self.witness is not None else None,
        }


def _strip_sweep(k: int) -> Tuple[int, Optional[List[int]]]:
    """Count nontrivial strip constructions of width k; return one of them."""
    full = (1 << STRIP_ROWS) - 1
    open_col = ColumnSpec(exact=0)
    strip_col = ColumnSpec(exact=STRIP_EXACT)
    body = [open_col] * _OPEN_COLUMNS + [strip_col] * k + [open_col] * _OPEN_COLUMNS
    frame = [VIRTUAL_COLUMN, VIRTUAL_COLUMN, *body, VIRTUAL_COLUMN, VIRTUAL_COLUMN]
    is_strip = [False, False] + [False] * _OPEN_COLUMNS + [True] * k + [False] * (_OPEN_COLUMNS + 2)

    Key = Tuple[FrontierState, bool]
    layer: Dict[Key, int] = {(BLANK_STATE, False): 1}
    backs: List[Dict[Key, Tuple[Key, int]]] = []
    for i in range(2, len(frame)):
        spec, exact_final = frame[i], frame[i - 2].exact
        nxt: Dict[Key, int] = {}
        back: Dict[Key, Tuple[Key, int]] = {}
        for (state, flag), count in layer.items():
            for knights in column_options(state, spec, full):
                new = advance(state, knights, spec, exact_final, full)
                if new is None:
                    continue
                mark = flag or (is_strip[i] and bool(~knights & STRIP_EXACT))
                key = (new, mark)
                if key not in nxt:
                    nxt[key] = 0
                    back[key] = ((state, flag), knights)
                nxt[key] += count
        layer = nxt
        backs.append(back)
        if not layer:
            return 0, None
    final = (BLANK_STATE, True)
    survivors = layer.get(final, 0)
    if not survivors:
        return 0, None
    columns = []
    key = final
    for back in reversed(backs):
        key, knights = back[key]
        columns.append(knights)
    columns.reverse()
    return survivors, columns[: len(body)]


def boundary_strip_search(k_max: int, k_start: int = 4) -> StripOutcome:
    """Iterative deepening over strip width along the board's bottom edge.

    Rows 1..3 of the strip need exactly one dominator, rows 4..5 and the two
    open columns on either side at most one. Width k+1 surviving implies width
    k survives (drop an end column), so the first dead width is final.
    """
    if k_max < k_start:
        raise BoardInputError(f"k_max must be at least {k_start}, got {k_max}.")
    survivors_by_k: Dict[int, int] = {}
    witness_cols: Optional[List[int]] = None
    for k in range(k_start, k_max + 1):
        start = time.perf_counter()
        count, columns = _strip_sweep(k)
        survivors_by_k[k] = count
        logger.debug("Strip width %d: %d nontrivial constructions (%.2fs)", k, count, time.perf_counter() - start)
        if not count:
            logger.info("Boundary strip: all constructions dead at k=%d", k)
            return StripOutcome(all_dead=True, k=k, survivors_by_k=survivors_by_k)
        witness_cols = columns
    dims = BoardDims(cols=len(witness_cols), rows=STRIP_ROWS)
    logger.info("Boundary strip: constructions still alive at k=%d", k_max)
    return StripOutcome(
        all_dead=False,
        k=k_max,
        survivors_by_k=survivors_by_k,
        witness=Placement.from_columns(dims, witness_cols),
    )


# -------------------------
# Infinite-board report
# -------------------------
class InfiniteBoardEntry(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    board: str
    outcome: str
    density: Optional[Fraction] = None
    evidence: str

    @field_serializer("density")
    def _density_text(self, v: Optional[Fraction]) -> Optional[str]:
        return None if v is None else str(v)


def classify_infinite_boards(
    max_band_rows: Optional[int] = None,
    strip_k_max: int = 12,
    window_radius: Optional[int] = 6,
) -> List[InfiniteBoardEntry]:
    """Every infinite board family: plane, bands, half-plane and quadrant.

    Band heights above ``max_band_rows`` are reported as inconclusive. The
    isolated-knight window search runs at ``window_radius``; pass None to skip it.
    """
    from perfdom.patterns import construct_zz_pattern, knight_neighbor_counts, verify_periodic

    top = max_band_rows if max_band_rows is not None else load_settings().max_band_rows
    entries: List[InfiniteBoardEntry] = []

    zz = construct_zz_pattern()
    evidence = f"periodic pattern verified={verify_periodic(zz)}, knight pairs={set(knight_neighbor_counts(zz).values()) == {1}}"
    if window_radius is not None:
        from perfdom.window_search import isolated_knight_search

        outcome = isolated_knight_search(window_radius)
        evidence += f", isolated knight at radius {window_radius}: {outcome.verdict.value}"
    entries.append(InfiniteBoardEntry(board="KN_{Z,Z}", outcome="nontrivial", density=zz.density, evidence=evidence))

    for m in range(2, 8):
        if m > top:
            for side in ("Z", "N"):
                entries.append(InfiniteBoardEntry(
                    board=f"KN_{{{side},{m}}}", outcome="inconclusive", evidence=f"band height above limit {top}",
                ))
            continue
        try:
            g = build_transition_graph(m, max_band_rows=top)
        except ResourceGuardError as e:
            logger.warning("Band m=%d skipped: %s", m, e)
            for side in ("Z", "N"):
                entries.append(InfiniteBoardEntry(board=f"KN_{{{side},{m}}}", outcome="inconclusive", evidence=str(e)))
            continue
        for side, result in (("Z", classify_two_sided(m, graph=g)), ("N", classify_one_sided(m, graph=g))):
            entries.append(InfiniteBoardEntry(
                board=f"KN_{{{side},{m}}}",
                outcome=result.outcome.value,
                density=result.min_density,
                evidence=f"transition graph with {result.states} states",
            ))

    strip = boundary_strip_search(strip_k_max)
    if strip.all_dead:
        verdict, why = "only-trivial", f"boundary strip dead at k={strip.k}; bands m>=5 only trivial"
    else:
        verdict, why = "inconclusive", f"boundary strip still alive at k={strip.k}"
    for board in ("KN_{Z,N}", "KN_{N,N}"):
        entries.append(InfiniteBoardEntry(board=board, outcome=verdict, evidence=why))
    return entries
