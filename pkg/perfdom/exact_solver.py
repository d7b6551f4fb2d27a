# exact_solver.py
"""Exact perfect domination numbers, enumeration and constrained completion.

The engine is a column sweep (broken-profile dynamic programming). Knight moves
reach two columns sideways, so after the knights of column c are chosen the
column c-2 can receive no further dominators and is checked ("finalized"). The
sweep state therefore keeps, for the two trailing columns, the knight bits and
the domination status of every non-knight square: still undominated
(``pending``) or dominated exactly once (``covered``). A second dominator on a
non-knight square kills the state at once.

Every board is framed by two virtual empty columns on each side, so the edge
columns need no special transition rules.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from perfdom.board import (
    BoardDims,
    Placement,
    SquareCoord,
    canonicalize,
    neighbor_masks,
    read_grid,
    transpose,
)
from perfdom.config import load_settings
from perfdom.errors import BoardInputError, ResourceGuardError

logger = logging.getLogger("perfdom.exact_solver")


# -------------------------
# Sweep state and transition
# -------------------------
class FrontierState(NamedTuple):
    """Knight bits and domination status of columns c-1 (prev) and c (cur).

    ``pending_*`` and ``covered_*`` are disjoint and only ever contain
    non-knight squares of real columns; virtual columns keep both at zero.
    """

    knights_prev: int
    knights_cur: int
    pending_prev: int
    pending_cur: int
    covered_prev: int
    covered_cur: int

    @property
    def has_empty(self) -> bool:
        return bool(self.pending_prev | self.pending_cur | self.covered_prev | self.covered_cur)


BLANK_STATE = FrontierState(0, 0, 0, 0, 0, 0)


class ColumnSpec(NamedTuple):
    """Per-column rules: rows in ``exact`` need exactly one dominator when the
    column is finalized, all other rows at most one."""

    exact: int
    must_knight: int = 0
    must_empty: int = 0
    virtual: bool = False


VIRTUAL_COLUMN = ColumnSpec(exact=0, virtual=True)


def _dominate(pending: int, covered: int, a: int, b: int) -> Optional[Tuple[int, int]]:
    # a and b are the two shifted hit masks of one knight column
    free = pending | covered
    hit = a | b
    if (a & b & free) or (hit & covered):
        return None
    return pending & ~hit, covered | (hit & pending)


def advance(
    state: FrontierState,
    knights: int,
    spec: ColumnSpec,
    exact_final: int,
    full: int,
) -> Optional[FrontierState]:
    """Place the next column and finalize column c-1; ``None`` if it dies."""
    kp, kc, pp, pc, cp, cc = state
    done = _dominate(pp, cp, (knights << 1) & full, knights >> 1)
    if done is None or done[0] & exact_final:
        return None
    mid = _dominate(pc, cc, (knights << 2) & full, knights >> 2)
    if mid is None:
        return None
    if spec.virtual:
        return FrontierState(kc, knights, mid[0], 0, mid[1], 0)
    new = _dominate(full & ~knights, 0, (kc << 2) & full, kc >> 2)
    if new is None:
        return None
    new = _dominate(new[0], new[1], (kp << 1) & full, kp >> 1)
    if new is None:
        return None
    return FrontierState(kc, knights, mid[0], new[0], mid[1], new[1])


@lru_cache(maxsize=1 << 16)
def _column_options(covered_prev: int, covered_cur: int, must_knight: int, must_empty: int, full: int) -> Tuple[int, ...]:
    forbidden = ((covered_prev << 1) | (covered_prev >> 1) | (covered_cur << 2) | (covered_cur >> 2)) & full
    allowed = full & ~forbidden & ~must_empty
    if must_knight & ~allowed:
        return ()
    free = allowed & ~must_knight
    options = []
    sub = free
    while True:
        options.append(sub | must_knight)
        if sub == 0:
            break
        sub = (sub - 1) & free
    options.reverse()
    return tuple(options)


def column_options(state: FrontierState, spec: ColumnSpec, full: int) -> Tuple[int, ...]:
    """Knight masks for the next column that cannot overdominate a covered square."""
    if spec.virtual:
        return (0,)
    return _column_options(state.covered_prev, state.covered_cur, spec.must_knight, spec.must_empty, full)


@dataclass
class SweepResult:
    rows: int
    layers: List[Dict[FrontierState, int]]
    back: List[Dict[FrontierState, Tuple[FrontierState, int]]]
    parents: Optional[List[Dict[FrontierState, List[Tuple[FrontierState, int]]]]] = None
    elapsed: float = 0.0

    @property
    def optimum(self) -> Optional[int]:
        return self.layers[-1].get(BLANK_STATE)

    @property
    def peak_states(self) -> int:
        return max(len(layer) for layer in self.layers)

    def best_columns(self) -> List[int]:
        """Knight masks of every placed column (virtual frame included)."""
        state = BLANK_STATE
        columns = []
        for t in range(len(self.layers) - 1, 0, -1):
            state, knights = self.back[t][state]
            columns.append(knights)
        columns.reverse()
        return columns


def sweep(specs: Sequence[ColumnSpec], rows: int, keep_parents: bool = False) -> SweepResult:
    """Minimize knights over all placements satisfying ``specs`` column by column."""
    start = time.perf_counter()
    full = (1 << rows) - 1
    frame = [VIRTUAL_COLUMN, VIRTUAL_COLUMN, *specs, VIRTUAL_COLUMN, VIRTUAL_COLUMN]
    layer: Dict[FrontierState, int] = {BLANK_STATE: 0}
    result = SweepResult(rows=rows, layers=[layer], back=[{}], parents=[{}] if keep_parents else None)
    for i in range(2, len(frame)):
        spec, exact_final = frame[i], frame[i - 2].exact
        nxt: Dict[FrontierState, int] = {}
        back: Dict[FrontierState, Tuple[FrontierState, int]] = {}
        par: Dict[FrontierState, List[Tuple[FrontierState, int]]] = {}
        for state, cost in layer.items():
            for knights in column_options(state, spec, full):
                new = advance(state, knights, spec, exact_final, full)
                if new is None:
                    continue
                total = cost + knights.bit_count()
                old = nxt.get(new)
                if old is None or total < old:
                    nxt[new] = total
                    back[new] = (state, knights)
                if keep_parents:
                    par.setdefault(new, []).append((state, knights))
        layer = nxt
        result.layers.append(layer)
        result.back.append(back)
        if keep_parents:
            result.parents.append(par)
        logger.debug("sweep column %d/%d: %d states", i - 1, len(frame) - 2, len(layer))
        if not layer:
            break
    result.elapsed = time.perf_counter() - start
    return result


# -------------------------
# Results and constraints
# -------------------------
class SolveResult(BaseModel):
    """gamma_p of a board with a minimum witness."""

    model_config = ConfigDict(frozen=True)

    dims: BoardDims
    gamma_p: int
    witness: Placement
    only_trivial: bool

    def to_json(self) -> dict:
        return {
            "format_version": 1,
            "cols": self.dims.cols,
            "rows": self.dims.rows,
            "gamma_p": self.gamma_p,
            "only_trivial": self.only_trivial,
            "witness": self.witness.to_json(),
        }


class CellConstraint(str, Enum):
    FREE = "free"
    MUST_BE_KNIGHT = "must-be-knight"
    MUST_BE_EMPTY = "must-be-empty"


_CONSTRAINT_SYMBOLS = {".": CellConstraint.FREE, "N": CellConstraint.MUST_BE_KNIGHT, "x": CellConstraint.MUST_BE_EMPTY}


class ConstraintGrid(BaseModel):
    """One CellConstraint per square, stored as two bitsets."""

    model_config = ConfigDict(frozen=True)

    dims: BoardDims
    must_knight: int = 0
    must_empty: int = 0

    @model_validator(mode="after")
    def _consistent(self) -> "ConstraintGrid":
        clash = self.must_knight & self.must_empty
        if clash:
            squares = [self.dims.square(i) for i in range(self.dims.cells) if clash >> i & 1]
            raise BoardInputError(f"Squares pinned both knight and empty: {squares}.")
        if (self.must_knight | self.must_empty) >> self.dims.cells:
            raise BoardInputError(f"Constraints exceed the {self.dims} board.")
        return self

    @classmethod
    def from_squares(
        cls,
        dims: BoardDims,
        knights: Iterable[Tuple[int, int]] = (),
        empties: Iterable[Tuple[int, int]] = (),
    ) -> "ConstraintGrid":
        return cls(
            dims=dims,
            must_knight=Placement.from_squares(dims, knights).bits,
            must_empty=Placement.from_squares(dims, empties).bits,
        )

    @classmethod
    def free(cls, dims: BoardDims) -> "ConstraintGrid":
        return cls(dims=dims)

    def cell(self, sq: Tuple[int, int]) -> CellConstraint:
        i = self.dims.index(sq)
        if self.must_knight >> i & 1:
            return CellConstraint.MUST_BE_KNIGHT
        if self.must_empty >> i & 1:
            return CellConstraint.MUST_BE_EMPTY
        return CellConstraint.FREE

    def transposed(self) -> "ConstraintGrid":
        return ConstraintGrid(
            dims=self.dims.transposed(),
            must_knight=transpose(Placement(dims=self.dims, bits=self.must_knight)).bits,
            must_empty=transpose(Placement(dims=self.dims, bits=self.must_empty)).bits,
        )


def parse_constraints(text: str) -> ConstraintGrid:
    """Grid format: 'N' must-be-knight, '.' free, 'x' must-be-empty."""
    dims, cells = read_grid(text, "".join(_CONSTRAINT_SYMBOLS))
    return ConstraintGrid.from_squares(
        dims,
        knights=[sq for sq, ch in cells.items() if _CONSTRAINT_SYMBOLS[ch] is CellConstraint.MUST_BE_KNIGHT],
        empties=[sq for sq, ch in cells.items() if _CONSTRAINT_SYMBOLS[ch] is CellConstraint.MUST_BE_EMPTY],
    )


class CompletionOutcome(BaseModel):
    """Either a nontrivial witness or a proof (by exhaustion) that none exists."""

    model_config = ConfigDict(frozen=True)

    dims: BoardDims
    nontrivial: bool
    witness: Optional[Placement] = None

    def to_json(self) -> dict:
        return {
            "format_version": 1,
            "verdict": "witness" if self.nontrivial else "no-nontrivial",
            "witness": self.witness.to_json() if self.witness is not None else None,
        }


# --- minimal in-memory cache of solved boards ---
# solve_gamma_p results keyed by board shape; cleared on demand.
_cache: Dict[str, SolveResult] = {}


def _cache_key(dims: BoardDims) -> str:
    return f"{dims.cols}x{dims.rows}"


def cache_clear() -> None:
    """Flush the solved-board cache."""
    _cache.clear()


def _sweep_plan(dims: BoardDims, max_rows: Optional[int]) -> Tuple[BoardDims, bool]:
    limit = max_rows if max_rows is not None else load_settings().max_rows
    if min(dims.cols, dims.rows) > limit:
        raise ResourceGuardError(
            f"Board {dims} needs a sweep {min(dims.cols, dims.rows)} rows wide; the limit is {limit}."
        )
    transposed = dims.rows > dims.cols
    return (dims.transposed() if transposed else dims), transposed


def _columns_to_placement(work: BoardDims, columns: Sequence[int], transposed: bool) -> Placement:
    placement = Placement.from_columns(work, columns)
    return transpose(placement) if transposed else placement


# -------------------------
# Operations
# -------------------------
def gamma_p_one_row(n: int) -> int:
    """KN_{n,1} has no edges, so every square must hold a knight."""
    return n


def gamma_p_two_rows_formula(n: int) -> int:
    """4k+2 for n = 6k+1, otherwise 4k with 6k-4 <= n <= 6k."""
    if n < 1:
        raise BoardInputError(f"Column count must be positive, got {n}.")
    if n % 6 == 1:
        return 4 * ((n - 1) // 6) + 2
    return 4 * -(-n // 6)


def solve_gamma_p(dims: BoardDims, max_rows: Optional[int] = None) -> SolveResult:
    """gamma_p(KN_{n,m}) by the column sweep.

    The witness is the canonical image of the optimum the back-pointers reach
    first; other optima may have a smaller canonical form.
    """
    work, transposed = _sweep_plan(dims, max_rows)
    key = _cache_key(dims)
    cached = _cache.get(key)
    if cached is not None:
        logger.debug("Cache hit for %s", key)
        return cached

    if min(dims.cols, dims.rows) == 1:
        # no knight moves fit, so every square is isolated
        solved = SolveResult(
            dims=dims,
            gamma_p=gamma_p_one_row(dims.cells),
            witness=Placement.full(dims),
            only_trivial=True,
        )
        _cache[key] = solved
        return solved

    result = sweep([ColumnSpec(exact=work.column_mask)] * work.cols, work.rows)
    gamma = result.optimum
    # the all-knight placement always qualifies, so the sweep never comes back empty
    columns = result.best_columns()[: work.cols]
    witness = canonicalize(_columns_to_placement(work, columns, transposed))
    solved = SolveResult(dims=dims, gamma_p=gamma, witness=witness, only_trivial=gamma == dims.cells)
    logger.info(
        "Solved %s: gamma_p=%d only_trivial=%s (peak %d states, %.2fs)",
        dims, gamma, solved.only_trivial, result.peak_states, result.elapsed,
    )
    _cache[key] = solved
    return solved


_BRUTE_CHUNK = 1 << 20


def brute_force_gamma_p(dims: BoardDims, max_cells: Optional[int] = None) -> SolveResult:
    """Independent oracle: test all 2^(n*m) subsets, vectorized with numpy.

    Ties between minimum sets go to the smallest bitset value.
    """
    limit = max_cells if max_cells is not None else load_settings().brute_force_cells
    cells = dims.cells
    if cells > limit:
        raise ResourceGuardError(f"Brute force refuses {dims} ({cells} cells > {limit}).")
    masks_nb = [np.uint64(m) for m in neighbor_masks(dims)]
    one = np.uint64(1)
    total = 1 << cells
    best_size, best_bits = cells + 1, None
    for lo in range(0, total, _BRUTE_CHUNK):
        subsets = np.arange(lo, min(total, lo + _BRUTE_CHUNK), dtype=np.uint64)
        ok = np.ones(subsets.shape, dtype=bool)
        for v, nb in enumerate(masks_nb):
            hits = subsets & nb
            single = (hits != 0) & ((hits & (hits - one)) == 0)
            ok &= ((subsets >> np.uint64(v)) & one).astype(bool) | single
        if not ok.any():
            continue
        valid = subsets[ok]
        sizes = np.bitwise_count(valid)
        size = int(sizes.min())
        bits = int(valid[sizes == size].min())
        if size < best_size or (size == best_size and bits < best_bits):
            best_size, best_bits = size, bits
    witness = Placement(dims=dims, bits=best_bits)
    logger.debug("Brute force %s: gamma_p=%d", dims, best_size)
    return SolveResult(dims=dims, gamma_p=best_size, witness=witness, only_trivial=best_size == cells)


def enumerate_pds(
    dims: BoardDims,
    max_size: int,
    up_to_symmetry: bool = False,
    max_rows: Optional[int] = None,
    limit: Optional[int] = None,
) -> List[Placement]:
    """Every perfect dominating set with at most ``max_size`` knights."""
    cap = limit if limit is not None else load_settings().enumerate_limit
    work, transposed = _sweep_plan(dims, max_rows)
    result = sweep([ColumnSpec(exact=work.column_mask)] * work.cols, work.rows, keep_parents=True)
    if result.optimum is None or result.optimum > max_size:
        return []

    found: set[int] = set()
    last = len(result.layers) - 1
    # walk back from the closing blank state; suffix counts knights already fixed
    stack: List[Tuple[int, FrontierState, int, Tuple[int, ...]]] = [(last, BLANK_STATE, 0, ())]
    while stack:
        t, state, suffix, cols = stack.pop()
        if t == 0:
            placement = _columns_to_placement(work, cols[: work.cols], transposed)
            if up_to_symmetry:
                placement = canonicalize(placement)
            found.add(placement.bits)
            if len(found) > cap:
                raise ResourceGuardError(f"More than {cap} placements; raise the enumeration limit.")
            continue
        for prev, knights in result.parents[t][state]:
            spent = suffix + knights.bit_count()
            if result.layers[t - 1][prev] + spent <= max_size:
                stack.append((t - 1, prev, spent, (knights,) + cols))
    placements = [Placement(dims=dims, bits=b) for b in sorted(found)]
    logger.info("Enumerated %d placements on %s with <= %d knights", len(placements), dims, max_size)
    return placements


def complete_partial(
    dims: BoardDims,
    constraints: ConstraintGrid,
    max_rows: Optional[int] = None,
) -> CompletionOutcome:
    """Find a nontrivial perfect dominating set honouring the pins, or prove none exists."""
    if constraints.dims != dims:
        raise BoardInputError(f"Constraint grid is {constraints.dims}, board is {dims}.")
    work, transposed = _sweep_plan(dims, max_rows)
    grid = constraints.transposed() if transposed else constraints
    full = work.column_mask
    specs = [
        ColumnSpec(
            exact=full,
            must_knight=(grid.must_knight >> (c * work.rows)) & full,
            must_empty=(grid.must_empty >> (c * work.rows)) & full,
        )
        for c in range(work.cols)
    ]
    result = sweep(specs, work.rows)
    best = result.optimum
    # a completion is nontrivial exactly when it leaves some square empty
    if best is None or best == dims.cells:
        logger.info("Completion on %s: no nontrivial perfect dominating set", dims)
        return CompletionOutcome(dims=dims, nontrivial=False)
    witness = _columns_to_placement(work, result.best_columns()[: work.cols], transposed)
    logger.info("Completion on %s: witness with %d knights", dims, best)
    return CompletionOutcome(dims=dims, nontrivial=True, witness=witness)


# -------------------------
# Minimal sub-board dominators (the 5x5 case split)
# -------------------------
class SubBoard(BaseModel):
    """Axis-aligned rectangle of squares: lower-left corner plus size."""

    model_config = ConfigDict(frozen=True)

    col: int = 1
    row: int = 1
    cols: int
    rows: int

    @model_validator(mode="after")
    def _shape(self) -> "SubBoard":
        if min(self.col, self.row, self.cols, self.rows) < 1:
            raise BoardInputError("Sub-board corner and size must be positive.")
        return self

    def squares(self) -> List[SquareCoord]:
        return [
            SquareCoord(c, r)
            for c in range(self.col, self.col + self.cols)
            for r in range(self.row, self.row + self.rows)
        ]


class CaseSet(NamedTuple):
    case: str
    knights: Tuple[Tuple[int, int], ...]
    forcing_square: Tuple[int, int]


# The thirteen constructions of the 5x5 case split, restricted to the lower-left
# 5x5 sub-board, with the square each one fails to dominate.
CORNER_CASE_SETS: Tuple[CaseSet, ...] = (
    CaseSet("1", ((1, 3), (2, 3), (3, 1), (4, 1)), (1, 4)),
    CaseSet("1", ((1, 1), (1, 3), (2, 1), (2, 4), (3, 2), (4, 3), (5, 1)), (1, 4)),
    CaseSet("1", ((1, 2), (1, 3), (2, 4), (3, 1), (3, 2), (4, 3), (5, 1)), (1, 4)),
    CaseSet("1", ((1, 2), (1, 5), (2, 3), (3, 1), (3, 4), (4, 2), (5, 3)), (1, 4)),
    CaseSet("2", ((1, 1), (2, 5), (3, 3), (4, 3)), (1, 5)),
    CaseSet("2", ((1, 1), (2, 1), (3, 3), (4, 3)), (1, 5)),
    CaseSet("2", ((1, 1), (1, 2), (1, 4), (2, 5), (3, 3)), (1, 5)),
    CaseSet("2", ((1, 1), (1, 2), (2, 5), (3, 3), (4, 1)), (1, 5)),
    CaseSet("2", ((1, 1), (1, 2), (1, 4), (2, 1), (3, 3)), (1, 5)),
    CaseSet("2", ((1, 3), (2, 4), (3, 2), (3, 5), (4, 3), (5, 1), (5, 4)), (1, 5)),
    CaseSet("2", ((1, 3), (2, 4), (2, 5), (3, 2), (4, 3), (4, 4), (5, 1)), (1, 5)),
    CaseSet("2", ((1, 3), (1, 4), (2, 1), (2, 5), (3, 2), (3, 3), (4, 4), (5, 2)), (1, 5)),
    CaseSet("3", ((1, 1), (1, 2), (2, 4), (3, 2), (3, 3), (4, 1), (4, 5), (5, 3)), (1, 5)),
)


def _corner_symmetries(dims: BoardDims, sub: SubBoard) -> List[Tuple[int, ...]]:
    """Index permutations fixing the sub-board: identity, plus the diagonal
    reflection when both board and sub-board sit symmetrically on it."""
    identity = tuple(range(dims.cells))
    perms = [identity]
    if dims.cols == dims.rows and sub.col == sub.row and sub.cols == sub.rows:
        perms.append(tuple(dims.index((sq.row, sq.col)) for sq in dims.squares()))
    return perms


def enumerate_minimal_subboard_dominators(
    dims: BoardDims,
    subboard: SubBoard,
    max_cells: int = 64,
) -> List[Placement]:
    """Inclusion-minimal knight sets that perfectly dominate ``subboard``.

    Knights are drawn from the sub-board and its neighbourhood. Every non-knight
    square of the sub-board needs exactly one dominator and every non-knight
    square of the whole board at most one. Results are deduplicated under the
    symmetries fixing the sub-board's corner and returned as the least
    representative of each class.
    """
    if dims.cells > max_cells:
        raise ResourceGuardError(f"Sub-board search refuses {dims} ({dims.cells} cells > {max_cells}).")
    for sq in subboard.squares():
        if not dims.contains(sq):
            raise BoardInputError(f"Sub-board square {tuple(sq)} lies outside the {dims} board.")

    nb = neighbor_masks(dims)
    sub_idx = [dims.index(sq) for sq in subboard.squares()]
    candidates = 0
    for v in sub_idx:
        candidates |= 1 << v | nb[v]

    valid: set[int] = set()

    def search(knights: int, banned: int) -> None:
        # a non-knight square with two dominators can only be rescued by a knight on it
        for v in range(dims.cells):
            if not knights >> v & 1 and (knights & nb[v]).bit_count() >= 2:
                if banned >> v & 1 or not candidates >> v & 1:
                    return
                search(knights | 1 << v, banned)
                return
        for v in sub_idx:
            if knights >> v & 1 or knights & nb[v]:
                continue
            options = [v] + [u for u in range(dims.cells) if nb[v] >> u & 1]
            tried = banned
            for u in options:
                if not tried >> u & 1:
                    search(knights | 1 << u, tried)
                tried |= 1 << u
            return
        valid.add(knights)

    search(0, 0)
    minimal = [s for s in valid if not any(t != s and t & s == t for t in valid)]
    perms = _corner_symmetries(dims, subboard)
    classes: set[int] = set()
    for s in minimal:
        images = []
        for perm in perms:
            bits = 0
            for i in range(dims.cells):
                if s >> i & 1:
                    bits |= 1 << perm[i]
            images.append(bits)
        classes.add(min(images))
    reps = [Placement(dims=dims, bits=b) for b in sorted(classes)]
    logger.info(
        "Sub-board %dx%d at (%d,%d) on %s: %d valid, %d minimal, %d classes",
        subboard.cols, subboard.rows, subboard.col, subboard.row, dims,
        len(valid), len(minimal), len(reps),
    )
    return reps
