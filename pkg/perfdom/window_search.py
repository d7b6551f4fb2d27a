# window_search.py
"""Finite-window search over the plane knights graph KN_{Z,Z}.

A window covers columns and rows -radius..radius. Empty squares whose eight
knight neighbours all lie inside the window ("interior") need exactly one
knight neighbour; every other empty square needs at most one, since knights
outside the window can only add dominators. An Unsat verdict therefore holds
for the whole plane; a Sat verdict at small radius proves nothing.
"""
from __future__ import annotations

import logging
import time
from enum import Enum, IntEnum
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from pydantic import BaseModel, ConfigDict

from perfdom.board import KNIGHT_MOVES
from perfdom.config import load_settings
from perfdom.errors import BoardInputError

logger = logging.getLogger("perfdom.window_search")

Coord = Tuple[int, int]


class CellState(IntEnum):
    UNKNOWN = 0
    KNIGHT = 1
    EMPTY = 2


@lru_cache(maxsize=32)
def _geometry(radius: int) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[bool, ...]]:
    side = 2 * radius + 1
    neighbors = []
    interior = []
    for i in range(side * side):
        x, y = i // side - radius, i % side - radius
        inside = [
            (x + dx + radius) * side + (y + dy + radius)
            for dx, dy in KNIGHT_MOVES
            if abs(x + dx) <= radius and abs(y + dy) <= radius
        ]
        neighbors.append(tuple(inside))
        interior.append(len(inside) == len(KNIGHT_MOVES))
    return tuple(neighbors), tuple(interior)


class Window:
    """Square window of the plane with per-square state and knight-neighbour counts."""

    __slots__ = ("radius", "cells", "dom")

    def __init__(self, radius: int, cells: Optional[List[int]] = None, dom: Optional[List[int]] = None):
        if radius < 0:
            raise BoardInputError(f"Window radius must be nonnegative, got {radius}.")
        size = (2 * radius + 1) ** 2
        self.radius = radius
        self.cells = cells if cells is not None else [CellState.UNKNOWN] * size
        self.dom = dom if dom is not None else [0] * size

    def copy(self) -> "Window":
        return Window(self.radius, self.cells.copy(), self.dom.copy())

    @property
    def side(self) -> int:
        return 2 * self.radius + 1

    def contains(self, sq: Coord) -> bool:
        return abs(sq[0]) <= self.radius and abs(sq[1]) <= self.radius

    def index(self, sq: Coord) -> int:
        if not self.contains(sq):
            raise BoardInputError(f"Square {tuple(sq)} lies outside the radius-{self.radius} window.")
        return (sq[0] + self.radius) * self.side + (sq[1] + self.radius)

    def coord(self, i: int) -> Coord:
        return i // self.side - self.radius, i % self.side - self.radius

    def cell(self, sq: Coord) -> CellState:
        return CellState(self.cells[self.index(sq)])

    def dom_count(self, sq: Coord) -> int:
        return self.dom[self.index(sq)]

    def is_interior(self, sq: Coord) -> bool:
        return _geometry(self.radius)[1][self.index(sq)]

    def squares(self, state: CellState) -> Set[Coord]:
        return {self.coord(i) for i, c in enumerate(self.cells) if c == state}

    def forbidden(self) -> Set[Coord]:
        """Squares that cannot hold a knight."""
        return self.squares(CellState.EMPTY)

    def knights(self) -> Set[Coord]:
        return self.squares(CellState.KNIGHT)

    @property
    def unknown(self) -> int:
        return sum(1 for c in self.cells if c == CellState.UNKNOWN)

    def assign(self, sq: Coord, state: CellState) -> None:
        """Pin a square; reassigning a pinned square to a different state is an error."""
        i = self.index(sq)
        current = self.cells[i]
        if current == state:
            return
        if current != CellState.UNKNOWN:
            raise BoardInputError(f"Square {tuple(sq)} is pinned both knight and empty.")
        _set(self, i, CellState(state), [])

    def render(self) -> str:
        symbols = {CellState.UNKNOWN: "?", CellState.KNIGHT: "N", CellState.EMPTY: "."}
        lines = []
        for y in range(self.radius, -self.radius - 1, -1):
            lines.append("".join(symbols[self.cell((x, y))] for x in range(-self.radius, self.radius + 1)))
        return "\n".join(lines)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Window) and (self.radius, self.cells) == (other.radius, other.cells)


# -------------------------
# Propagation
# -------------------------
def _set(w: Window, i: int, state: CellState, queue: List[int]) -> None:
    neighbors = _geometry(w.radius)[0][i]
    w.cells[i] = state
    if state == CellState.KNIGHT:
        for j in neighbors:
            w.dom[j] += 1
    queue.append(i)
    queue.extend(neighbors)


def _run(w: Window, queue: List[int]) -> bool:
    neighbors, interior = _geometry(w.radius)
    cells, dom = w.cells, w.dom
    while queue:
        i = queue.pop()
        state = cells[i]
        if state == CellState.EMPTY:
            if dom[i] >= 2:
                return False
            if dom[i] == 1:
                for j in neighbors[i]:
                    if cells[j] == CellState.UNKNOWN:
                        _set(w, j, CellState.EMPTY, queue)
            elif interior[i]:
                open_ = [j for j in neighbors[i] if cells[j] == CellState.UNKNOWN]
                if not open_:
                    return False
                if len(open_) == 1:
                    _set(w, open_[0], CellState.KNIGHT, queue)
        elif state == CellState.UNKNOWN and dom[i] >= 2:
            # an empty square here would be dominated twice
            _set(w, i, CellState.KNIGHT, queue)
    return True


def propagate(w: Window) -> Optional[Window]:
    """Unit-propagation fixpoint of ``w``; ``None`` signals a contradiction."""
    out = w.copy()
    if not _run(out, list(range(len(out.cells)))):
        return None
    return out


def check_window(w: Window) -> bool:
    """Every square assigned and every window constraint met."""
    _, interior = _geometry(w.radius)
    for i, state in enumerate(w.cells):
        if state == CellState.UNKNOWN:
            return False
        if state == CellState.EMPTY:
            if w.dom[i] >= 2 or (interior[i] and w.dom[i] != 1):
                return False
    return True


# -------------------------
# Search
# -------------------------
class Verdict(str, Enum):
    UNSAT = "unsat"
    SAT = "sat"
    INCONCLUSIVE = "inconclusive"


class SearchOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    verdict: Verdict
    radius: int
    nodes: int
    elapsed: float = 0.0
    witness: Optional[str] = None
    witness_knights: List[Coord] = []

    def to_json(self) -> dict:
        return {"format_version": 1, **self.model_dump(mode="json")}


class _BudgetExhausted(Exception):
    pass


def _branch_cell(w: Window) -> Optional[int]:
    neighbors, interior = _geometry(w.radius)
    cells, dom = w.cells, w.dom
    tight = [
        cells[i] == CellState.EMPTY and interior[i] and dom[i] == 0
        for i in range(len(cells))
    ]
    best, best_score = None, -1
    for i, state in enumerate(cells):
        if state != CellState.UNKNOWN:
            continue
        score = sum(tight[j] for j in neighbors[i])
        if score > best_score:
            best, best_score = i, score
    return best


def _search(start: Window, node_limit: int) -> Tuple[Verdict, Optional[Window], int]:
    nodes = 0

    def dfs(w: Window) -> Optional[Window]:
        nonlocal nodes
        if nodes >= node_limit:
            raise _BudgetExhausted
        nodes += 1
        i = _branch_cell(w)
        if i is None:
            return w
        for state in (CellState.EMPTY, CellState.KNIGHT):
            child = w.copy()
            queue: List[int] = []
            _set(child, i, state, queue)
            if _run(child, queue):
                found = dfs(child)
                if found is not None:
                    return found
        return None

    if node_limit <= 0:
        return Verdict.INCONCLUSIVE, None, 0
    root = propagate(start)
    if root is None:
        return Verdict.UNSAT, None, 0
    try:
        found = dfs(root)
    except _BudgetExhausted:
        return Verdict.INCONCLUSIVE, None, nodes
    if found is None:
        return Verdict.UNSAT, None, nodes
    return Verdict.SAT, found, nodes


Pin = Tuple[Coord, CellState]


def _pinned_window(pins: Iterable[Pin], radius: int) -> Window:
    w = Window(radius)
    seen: Dict[Coord, CellState] = {}
    for sq, state in pins:
        sq = (int(sq[0]), int(sq[1]))
        state = CellState(state)
        if state == CellState.UNKNOWN:
            raise BoardInputError(f"Pin at {sq} must be knight or empty.")
        if seen.get(sq, state) != state:
            raise BoardInputError(f"Square {sq} is pinned both knight and empty.")
        seen[sq] = state
        w.assign(sq, state)
    return w


def assumption_search(pins: Sequence[Pin], radius: int, node_limit: Optional[int] = None) -> SearchOutcome:
    """DFS with propagation from the pinned squares; empty is tried before knight."""
    limit = node_limit if node_limit is not None else load_settings().node_limit
    start = time.perf_counter()
    window = _pinned_window(pins, radius)
    verdict, found, nodes = _search(window, limit)
    elapsed = time.perf_counter() - start
    if verdict is Verdict.INCONCLUSIVE:
        logger.warning("Window search radius %d inconclusive after %d nodes", radius, nodes)
    else:
        logger.info("Window search radius %d: %s after %d nodes (%.2fs)", radius, verdict.value, nodes, elapsed)
    return SearchOutcome(
        verdict=verdict,
        radius=radius,
        nodes=nodes,
        elapsed=elapsed,
        witness=found.render() if found is not None else None,
        witness_knights=sorted(found.knights()) if found is not None else [],
    )


def isolated_pins(center: Coord = (0, 0)) -> List[Pin]:
    """A knight at ``center`` with all eight knight neighbours empty."""
    cx, cy = center
    return [((cx, cy), CellState.KNIGHT)] + [((cx + dx, cy + dy), CellState.EMPTY) for dx, dy in KNIGHT_MOVES]


def isolated_knight_search(radius: int, node_limit: Optional[int] = None) -> SearchOutcome:
    """Can a perfect dominating set of the plane contain an isolated knight?"""
    if radius < 2:
        raise BoardInputError(f"The isolated-knight window needs radius >= 2, got {radius}.")
    return assumption_search(isolated_pins(), radius, node_limit)


def exclusion_zone(radius: int) -> Set[Coord]:
    """Squares propagation forbids around an isolated knight at the origin."""
    w = propagate(_pinned_window(isolated_pins(), radius))
    return w.forbidden() if w is not None else set()


def _with_isolated(*extra: Pin) -> Tuple[Pin, ...]:
    return tuple(isolated_pins()) + extra


_K, _E = CellState.KNIGHT, CellState.EMPTY

# Isolated knight at the origin plus a diagonal knight at (2,-2), split by the
# knight dominating (0,1); the last entry leaves all four diagonals empty.
ZZ_CASE_PINS: Dict[str, Tuple[Pin, ...]] = {
    "case-1": _with_isolated(((2, -2), _K), ((2, 2), _K)),
    "case-2": _with_isolated(((2, -2), _K), ((0, 1), _K)),
    "case-3a": _with_isolated(((2, -2), _K), ((-2, 2), _K), ((3, 0), _K)),
    "case-3b": _with_isolated(((2, -2), _K), ((-2, 2), _K), ((3, -2), _K)),
    "corners-empty": _with_isolated(((2, 2), _E), ((2, -2), _E), ((-2, 2), _E), ((-2, -2), _E)),
}


def parse_pins(text: str) -> List[Pin]:
    """Lines ``i j N`` (knight) or ``i j x`` (empty); '#' starts a comment."""
    pins: List[Pin] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[2] not in ("N", "x"):
            raise BoardInputError(f"line {lineno}: expected 'i j N' or 'i j x', got {raw!r}.")
        try:
            sq = (int(parts[0]), int(parts[1]))
        except ValueError as e:
            raise BoardInputError(f"line {lineno}: coordinates must be integers ({e}).") from e
        pins.append((sq, _K if parts[2] == "N" else _E))
    return pins


def window_from_pattern(is_knight: Callable[[int, int], bool], radius: int) -> Window:
    """Fully assigned window from a knight predicate on plane coordinates."""
    w = Window(radius)
    for i in range(len(w.cells)):
        x, y = w.coord(i)
        _set(w, i, _K if is_knight(x, y) else _E, [])
    return w
