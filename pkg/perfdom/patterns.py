# patterns.py
"""Explicit perfect dominating constructions, finite and periodic.

Finite boards get literal column blocks (bit j-1 of a column mask is row j).
Periodic patterns repeat a fundamental domain over a lattice of period vectors:
two vectors for the plane, one horizontal vector for a band of fixed height.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from perfdom.board import KNIGHT_MOVES, BoardDims, Placement, SquareCoord
from perfdom.errors import BoardInputError, UnsupportedCaseError

logger = logging.getLogger("perfdom.patterns")


def _col(*rows: int) -> int:
    mask = 0
    for r in rows:
        mask |= 1 << (r - 1)
    return mask


# -------------------------
# Three rows
# -------------------------
# Repeating 8-column block with 10 knights.
THREE_ROW_TILE: Tuple[int, ...] = (
    _col(2), _col(), _col(1, 2, 3), _col(1), _col(2, 3), _col(1), _col(1, 3), _col(),
)
# Same block shifted right by one column, used after the 8k+4 prefix.
THREE_ROW_TILE_SHIFTED: Tuple[int, ...] = THREE_ROW_TILE[-1:] + THREE_ROW_TILE[:-1]

# residue mod 8 -> (prefix columns, tile to repeat)
THREE_ROW_PREFIXES: Dict[int, Tuple[Tuple[int, ...], Tuple[int, ...]]] = {
    0: ((), THREE_ROW_TILE),
    4: ((_col(3), _col(2, 3), _col(1), _col(1, 3)), THREE_ROW_TILE_SHIFTED),
    5: ((_col(3), _col(2, 3), _col(1), _col(1, 3), _col()), THREE_ROW_TILE),
    6: ((_col(1), _col(3), _col(2, 3), _col(1), _col(1, 3), _col()), THREE_ROW_TILE),
    7: ((_col(), _col(1, 2, 3), _col(1), _col(2, 3), _col(1), _col(1, 3), _col()), THREE_ROW_TILE),
}


def three_row_bound(n: int) -> int:
    """Knights used by :func:`construct_3rows`: 10k, 10k+6, 10k+6, 10k+7, 10k+9."""
    k, residue = divmod(n, 8)
    if residue not in THREE_ROW_PREFIXES:
        raise UnsupportedCaseError(_open_three_row_message(n))
    prefix, _ = THREE_ROW_PREFIXES[residue]
    return 10 * k + sum(c.bit_count() for c in prefix)


def _open_three_row_message(n: int) -> str:
    return (
        f"No 3-row construction for n={n}: the cases n = 8k+1, 8k+2, 8k+3 are open; "
        "use solve_gamma_p for an exact value."
    )


def construct_3rows(n: int) -> Placement:
    """Prefix block for n mod 8, then k copies of the 8-column tile."""
    if n < 4 or n % 8 not in THREE_ROW_PREFIXES:
        raise UnsupportedCaseError(_open_three_row_message(n))
    prefix, tile = THREE_ROW_PREFIXES[n % 8]
    columns = list(prefix) + list(tile) * (n // 8)
    return Placement.from_columns(BoardDims(cols=n, rows=3), columns)


# -------------------------
# Four rows
# -------------------------
def construct_4rows(n: int) -> Placement:
    """Columns 1, 0 (mod 4) hold rows {1,3}; columns 2, 3 (mod 4) hold rows {2,4}."""
    if n < 4 or n % 2:
        raise UnsupportedCaseError(f"The 4-row pattern only perfectly dominates even n >= 4, got n={n}.")
    columns = [_col(1, 3) if c % 4 in (0, 1) else _col(2, 4) for c in range(1, n + 1)]
    return Placement.from_columns(BoardDims(cols=n, rows=4), columns)


# -------------------------
# Two rows
# -------------------------
def _path_knights(length: int) -> List[int]:
    # 1-based positions on a path that dominate it perfectly with ceil(L/3) knights
    if length == 1:
        return [1]
    picks = list(range(2, length + 1, 3))
    if length % 3 == 1:
        picks.append(length - 1)
    return picks


def construct_2rows(n: int) -> Placement:
    """Minimum perfect dominating set of KN_{n,2}.

    Two rows leave only the (±2, ±1) moves, so the graph splits into four
    paths, one per start column in {1, 2} and start row in {1, 2}, each
    stepping two columns right and switching row. Each path is dominated
    with every third square.
    """
    if n < 1:
        raise BoardInputError(f"Column count must be positive, got {n}.")
    dims = BoardDims(cols=n, rows=2)
    squares = []
    for start_col in (1, 2):
        length = len(range(start_col, n + 1, 2))
        for start_row in (1, 2):
            for i in _path_knights(length):
                row = start_row if i % 2 else 3 - start_row
                squares.append((start_col + 2 * (i - 1), row))
    return Placement.from_squares(dims, squares)


# -------------------------
# Periodic patterns
# -------------------------
class PeriodicPattern(BaseModel):
    """Knight offsets repeated over a lattice.

    With ``rows`` unset the lattice has two period vectors spanning Z x Z.
    With ``rows`` set the pattern is a band of that height, repeated by one
    horizontal vector ``(p, 0)``; offsets then use rows 1..rows.
    """

    model_config = ConfigDict(frozen=True)

    period_vectors: List[Tuple[int, int]]
    knight_offsets: List[SquareCoord]
    rows: Optional[int] = None

    @property
    def is_band(self) -> bool:
        return self.rows is not None

    @property
    def area(self) -> int:
        return _Lattice.of(self).area

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.knight_offsets), self.area)

    def is_knight(self, x: int, y: int) -> bool:
        lattice = _Lattice.of(self)
        if self.is_band and not 1 <= y <= self.rows:
            return False
        return lattice.reduce(x, y) in lattice.knights(self)

    def to_json(self) -> dict:
        return {
            "format_version": 1,
            "periods": [list(v) for v in self.period_vectors],
            "offsets": [[sq.col, sq.row] for sq in self.knight_offsets],
            "rows": self.rows,
            "density": str(self.density),
        }


class _Lattice:
    """Canonical residues for a period lattice.

    Plane lattices are brought to the form span{(A, 0), (q, r)}, so a residue
    is (x mod A, y mod r) after shifting y into [0, r) along (q, r).
    """

    def __init__(self, a: int, q: int, r: int, band_rows: Optional[int]):
        self.a, self.q, self.r, self.band_rows = a, q, r, band_rows

    @classmethod
    def of(cls, p: PeriodicPattern) -> "_Lattice":
        if p.is_band:
            if p.rows < 1 or len(p.period_vectors) != 1:
                raise BoardInputError("A band pattern needs a positive height and one period vector.")
            (px, py), = p.period_vectors
            if py != 0 or px == 0:
                raise BoardInputError(f"Band period must be horizontal and nonzero, got {(px, py)}.")
            return cls(abs(px), 0, 0, p.rows)
        if len(p.period_vectors) != 2:
            raise BoardInputError("A plane pattern needs exactly two period vectors.")
        (a, b), (c, d) = p.period_vectors
        det = a * d - b * c
        if det == 0:
            raise BoardInputError(f"Degenerate lattice: period vectors {(a, b)} and {(c, d)} are dependent.")
        r, s, t = _ext_gcd(b, d)
        q = s * a + t * c
        return cls(abs(det) // r, q, r, None)

    @property
    def area(self) -> int:
        return self.a * self.band_rows if self.band_rows is not None else self.a * self.r

    def reduce(self, x: int, y: int) -> Tuple[int, int]:
        if self.band_rows is not None:
            return x % self.a, y
        k = y // self.r
        return (x - k * self.q) % self.a, y - k * self.r

    def residues(self) -> List[Tuple[int, int]]:
        if self.band_rows is not None:
            return [(x, y) for x in range(self.a) for y in range(1, self.band_rows + 1)]
        return [(x, y) for x in range(self.a) for y in range(self.r)]

    def neighbors(self, x: int, y: int) -> List[Tuple[int, int]]:
        out = []
        for dx, dy in KNIGHT_MOVES:
            if self.band_rows is not None and not 1 <= y + dy <= self.band_rows:
                continue
            out.append((x + dx, y + dy))
        return out

    def knights(self, p: PeriodicPattern) -> frozenset:
        cells = [self.reduce(*sq) for sq in p.knight_offsets]
        for sq in p.knight_offsets:
            if p.is_band and not 1 <= sq.row <= p.rows:
                raise BoardInputError(f"Offset {tuple(sq)} lies outside the {p.rows}-row band.")
        if len(set(cells)) != len(cells):
            raise BoardInputError("Knight offsets repeat a lattice residue.")
        return frozenset(cells)


def _ext_gcd(b: int, d: int) -> Tuple[int, int, int]:
    """(g, s, t) with s*b + t*d = g = gcd(b, d) >= 0."""
    old_r, r = b, d
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _dominators(lattice: _Lattice, knights: frozenset, x: int, y: int) -> int:
    return sum(lattice.reduce(u, v) in knights for u, v in lattice.neighbors(x, y))


def verify_periodic(p: PeriodicPattern) -> bool:
    """True iff every non-knight residue has exactly one knight neighbour."""
    lattice = _Lattice.of(p)
    knights = lattice.knights(p)
    for x, y in lattice.residues():
        if (x, y) in knights:
            continue
        if _dominators(lattice, knights, x, y) != 1:
            logger.debug("Residue %s has %d dominators", (x, y), _dominators(lattice, knights, x, y))
            return False
    return True


def knight_neighbor_counts(p: PeriodicPattern) -> Dict[SquareCoord, int]:
    """Number of knight neighbours of every knight in the fundamental domain."""
    lattice = _Lattice.of(p)
    knights = lattice.knights(p)
    return {sq: _dominators(lattice, knights, sq.col, sq.row) for sq in p.knight_offsets}


def unique_domination_counts(p: PeriodicPattern) -> Dict[SquareCoord, int]:
    """Squares dominated by this knight alone, the knight itself included."""
    lattice = _Lattice.of(p)
    knights = lattice.knights(p)
    counts = {}
    for sq in p.knight_offsets:
        own = 1
        for x, y in lattice.neighbors(sq.col, sq.row):
            if lattice.reduce(x, y) not in knights and _dominators(lattice, knights, x, y) == 1:
                own += 1
        counts[sq] = own
    return counts


def construct_zz_pattern() -> PeriodicPattern:
    """Horizontal knight pairs on the lattice spanned by (2,-2) and (3,5): density 1/8."""
    return PeriodicPattern(
        period_vectors=[(2, -2), (3, 5)],
        knight_offsets=[SquareCoord(0, 0), SquareCoord(1, 0)],
    )


def band_pattern(rows: int) -> PeriodicPattern:
    """Periodic nontrivial pattern of the m-row band for m = 2, 3, 4."""
    if rows == 2:
        # columns 0 and 1 full, then four empty columns
        return PeriodicPattern(
            period_vectors=[(6, 0)],
            knight_offsets=[SquareCoord(c, r) for c in (0, 1) for r in (1, 2)],
            rows=2,
        )
    if rows == 3:
        return _band_from_columns(THREE_ROW_TILE, 3)
    if rows == 4:
        return _band_from_columns((_col(1, 3), _col(1, 3), _col(2, 4), _col(2, 4)), 4)
    raise UnsupportedCaseError(f"No nontrivial band pattern for m={rows}; bands exist only for m = 2, 3, 4.")


def _band_from_columns(columns: Sequence[int], rows: int) -> PeriodicPattern:
    offsets = [SquareCoord(c, r) for c, mask in enumerate(columns) for r in range(1, rows + 1) if mask >> (r - 1) & 1]
    return PeriodicPattern(period_vectors=[(len(columns), 0)], knight_offsets=offsets, rows=rows)


def pattern_window(p: PeriodicPattern, cols: Sequence[int], rows: Sequence[int]) -> Dict[Tuple[int, int], bool]:
    """Knight occupancy of the pattern over a rectangle of plane coordinates."""
    return {(x, y): p.is_knight(x, y) for x in cols for y in rows}
