# board.py
"""Board geometry for knights graphs KN_{n,m}.

Coordinates are 1-based and column-first with the origin in the bottom-left
corner: ``(i, j)`` is the square in column ``i`` and row ``j``. A placement is
stored as a dense bitset in column-major order, bit ``(i-1)*m + (j-1)``, so each
column is a contiguous run of ``m`` bits.
"""
from __future__ import annotations

import json
import logging
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, List, NamedTuple, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from perfdom.errors import BoardInputError

logger = logging.getLogger("perfdom.board")

KNIGHT_MOVES: Tuple[Tuple[int, int], ...] = (
    (1, 2), (2, 1), (2, -1), (1, -2),
    (-1, -2), (-2, -1), (-2, 1), (-1, 2),
)


class SquareCoord(NamedTuple):
    col: int
    row: int


class BoardDims(BaseModel):
    """Finite board shape: ``cols`` is n, ``rows`` is m."""

    model_config = ConfigDict(frozen=True)

    cols: int
    rows: int

    @model_validator(mode="after")
    def _positive(self) -> "BoardDims":
        if self.cols < 1 or self.rows < 1:
            raise BoardInputError(
                f"Board dimensions must be positive, got {self.cols}x{self.rows}."
            )
        return self

    @property
    def cells(self) -> int:
        return self.cols * self.rows

    @property
    def column_mask(self) -> int:
        return (1 << self.rows) - 1

    def transposed(self) -> "BoardDims":
        return BoardDims(cols=self.rows, rows=self.cols)

    def contains(self, sq: Tuple[int, int]) -> bool:
        return 1 <= sq[0] <= self.cols and 1 <= sq[1] <= self.rows

    def index(self, sq: Tuple[int, int]) -> int:
        return (sq[0] - 1) * self.rows + (sq[1] - 1)

    def square(self, index: int) -> SquareCoord:
        col, row = divmod(index, self.rows)
        return SquareCoord(col + 1, row + 1)

    def squares(self) -> List[SquareCoord]:
        """All squares in bit order (column-major)."""
        return [SquareCoord(c, r) for c in range(1, self.cols + 1) for r in range(1, self.rows + 1)]

    def __str__(self) -> str:
        return f"{self.cols}x{self.rows}"


class Placement(BaseModel):
    """A set of knight-occupied squares on a finite board (bitset semantics)."""

    model_config = ConfigDict(frozen=True)

    dims: BoardDims
    bits: int = 0

    @model_validator(mode="after")
    def _within_board(self) -> "Placement":
        if self.bits < 0 or self.bits >> self.dims.cells:
            raise BoardInputError(f"Placement bits exceed the {self.dims} board.")
        return self

    # --- constructors ---
    @classmethod
    def from_squares(cls, dims: BoardDims, squares: Iterable[Tuple[int, int]]) -> "Placement":
        bits = 0
        for sq in squares:
            _require_on_board(dims, sq)
            bits |= 1 << dims.index(sq)
        return cls(dims=dims, bits=bits)

    @classmethod
    def from_columns(cls, dims: BoardDims, columns: Iterable[int]) -> "Placement":
        """Build from per-column knight masks (bit j-1 of a mask is row j)."""
        bits = 0
        count = 0
        for offset, mask in enumerate(columns):
            bits |= (mask & dims.column_mask) << (offset * dims.rows)
            count += 1
        if count != dims.cols:
            raise BoardInputError(f"Expected {dims.cols} columns, got {count}.")
        return cls(dims=dims, bits=bits)

    @classmethod
    def empty(cls, dims: BoardDims) -> "Placement":
        return cls(dims=dims, bits=0)

    @classmethod
    def full(cls, dims: BoardDims) -> "Placement":
        return cls(dims=dims, bits=(1 << dims.cells) - 1)

    # --- queries ---
    @property
    def knights(self) -> List[SquareCoord]:
        return [self.dims.square(i) for i in _bit_indices(self.bits)]

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    @property
    def is_full(self) -> bool:
        return self.bits == (1 << self.dims.cells) - 1

    def has_knight(self, sq: Tuple[int, int]) -> bool:
        return self.dims.contains(sq) and bool(self.bits >> self.dims.index(sq) & 1)

    def column(self, col: int) -> int:
        return (self.bits >> ((col - 1) * self.dims.rows)) & self.dims.column_mask

    def columns(self) -> List[int]:
        return [self.column(c) for c in range(1, self.dims.cols + 1)]

    def with_knights(self, squares: Iterable[Tuple[int, int]]) -> "Placement":
        extra = Placement.from_squares(self.dims, squares)
        return Placement(dims=self.dims, bits=self.bits | extra.bits)

    def to_json(self) -> dict:
        return {
            "cols": self.dims.cols,
            "rows": self.dims.rows,
            "knights": [[sq.col, sq.row] for sq in self.knights],
        }


def _bit_indices(bits: int) -> List[int]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


def _require_on_board(dims: BoardDims, sq: Tuple[int, int]) -> None:
    if not dims.contains(sq):
        raise BoardInputError(f"Square {tuple(sq)} lies outside the {dims} board.")


# -------------------------
# Knight adjacency
# -------------------------
def knight_neighbors(dims: BoardDims, sq: Tuple[int, int]) -> frozenset[SquareCoord]:
    """Open neighbourhood N(sq): every knight-move target on the board."""
    _require_on_board(dims, sq)
    col, row = sq
    return frozenset(
        SquareCoord(col + dc, row + dr)
        for dc, dr in KNIGHT_MOVES
        if dims.contains((col + dc, row + dr))
    )


def closed_neighbors(dims: BoardDims, sq: Tuple[int, int]) -> frozenset[SquareCoord]:
    """Closed neighbourhood N[sq] = N(sq) plus sq itself."""
    return knight_neighbors(dims, sq) | {SquareCoord(*sq)}


@lru_cache(maxsize=256)
def _neighbor_masks(cols: int, rows: int) -> Tuple[int, ...]:
    dims = BoardDims(cols=cols, rows=rows)
    masks = []
    for sq in dims.squares():
        mask = 0
        for dc, dr in KNIGHT_MOVES:
            target = (sq.col + dc, sq.row + dr)
            if dims.contains(target):
                mask |= 1 << dims.index(target)
        masks.append(mask)
    return tuple(masks)


def neighbor_masks(dims: BoardDims) -> Tuple[int, ...]:
    """Bitmask of N(v) for every square index v, cached per board shape."""
    return _neighbor_masks(dims.cols, dims.rows)


# -------------------------
# Board symmetries
# -------------------------
class Symmetry(str, Enum):
    IDENTITY = "identity"
    HORIZONTAL_FLIP = "horizontal-flip"
    VERTICAL_FLIP = "vertical-flip"
    ROTATE_180 = "rotate-180"
    ROTATE_90 = "rotate-90"
    ROTATE_270 = "rotate-270"
    DIAGONAL_FLIP = "diagonal-flip"
    ANTI_DIAGONAL_FLIP = "anti-diagonal-flip"


_RECTANGLE_GROUP = (
    Symmetry.IDENTITY,
    Symmetry.HORIZONTAL_FLIP,
    Symmetry.VERTICAL_FLIP,
    Symmetry.ROTATE_180,
)
_SQUARE_EXTRA = (
    Symmetry.ROTATE_90,
    Symmetry.ROTATE_270,
    Symmetry.DIAGONAL_FLIP,
    Symmetry.ANTI_DIAGONAL_FLIP,
)


def symmetry_group(dims: BoardDims) -> List[Symmetry]:
    """Automorphisms of the board rectangle: 4 elements, 8 on square boards."""
    if dims.cols == dims.rows:
        return list(_RECTANGLE_GROUP + _SQUARE_EXTRA)
    return list(_RECTANGLE_GROUP)


def apply_symmetry(kind: Symmetry, dims: BoardDims, sq: Tuple[int, int]) -> SquareCoord:
    n, m = dims.cols, dims.rows
    i, j = sq
    if kind is Symmetry.IDENTITY:
        return SquareCoord(i, j)
    if kind is Symmetry.HORIZONTAL_FLIP:
        return SquareCoord(n + 1 - i, j)
    if kind is Symmetry.VERTICAL_FLIP:
        return SquareCoord(i, m + 1 - j)
    if kind is Symmetry.ROTATE_180:
        return SquareCoord(n + 1 - i, m + 1 - j)
    if n != m:
        raise BoardInputError(f"{kind.value} is only a symmetry of square boards.")
    if kind is Symmetry.ROTATE_90:
        return SquareCoord(n + 1 - j, i)
    if kind is Symmetry.ROTATE_270:
        return SquareCoord(j, n + 1 - i)
    if kind is Symmetry.DIAGONAL_FLIP:
        return SquareCoord(j, i)
    return SquareCoord(n + 1 - j, n + 1 - i)


@lru_cache(maxsize=256)
def _permutation(kind: Symmetry, cols: int, rows: int) -> Tuple[int, ...]:
    dims = BoardDims(cols=cols, rows=rows)
    return tuple(dims.index(apply_symmetry(kind, dims, sq)) for sq in dims.squares())


def transform(p: Placement, kind: Symmetry) -> Placement:
    perm = _permutation(kind, p.dims.cols, p.dims.rows)
    bits = 0
    for i in _bit_indices(p.bits):
        bits |= 1 << perm[i]
    return Placement(dims=p.dims, bits=bits)


def orbit(p: Placement) -> List[Placement]:
    return [transform(p, g) for g in symmetry_group(p.dims)]


def canonicalize(p: Placement) -> Placement:
    """Least image of ``p`` (by bitset value) under the board's symmetry group."""
    return min(orbit(p), key=lambda q: q.bits)


def transpose(p: Placement) -> Placement:
    """Mirror across the main diagonal onto the transposed board."""
    dims_t = p.dims.transposed()
    bits = 0
    for sq in p.knights:
        bits |= 1 << dims_t.index((sq.row, sq.col))
    return Placement(dims=dims_t, bits=bits)


# -------------------------
# Text formats
# -------------------------
def read_grid(text: str, alphabet: str) -> Tuple[BoardDims, Dict[SquareCoord, str]]:
    """Parse ``"n m"`` followed by m rows of n symbols, top row first.

    Returns the dims and the symbol at every square. Errors name the offending
    line (1-based).
    """
    lines = [ln.rstrip() for ln in text.splitlines()]
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise BoardInputError("line 1: empty board file.")
    header = lines[0].split()
    if len(header) != 2 or not all(tok.lstrip("-").isdigit() for tok in header):
        raise BoardInputError(f"line 1: expected 'n m', got {lines[0]!r}.")
    dims = BoardDims(cols=int(header[0]), rows=int(header[1]))
    body = lines[1:]
    if len(body) != dims.rows:
        raise BoardInputError(
            f"line {len(lines) + 1}: expected {dims.rows} grid rows, found {len(body)}."
        )
    cells: Dict[SquareCoord, str] = {}
    for offset, line in enumerate(body):
        lineno = offset + 2
        row = dims.rows - offset
        symbols = line.strip()
        if len(symbols) != dims.cols:
            raise BoardInputError(
                f"line {lineno}: expected {dims.cols} symbols, got {len(symbols)}."
            )
        for col, ch in enumerate(symbols, start=1):
            if ch not in alphabet:
                raise BoardInputError(f"line {lineno}: unexpected symbol {ch!r}.")
            cells[SquareCoord(col, row)] = ch
    return dims, cells


def parse_placement(text: str) -> Placement:
    """Accept the grid format ('N' knight, '.' empty) or the JSON alternative."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
            dims = BoardDims(cols=int(data["cols"]), rows=int(data["rows"]))
            knights = [tuple(k) for k in data["knights"]]
        except (KeyError, TypeError, ValueError) as e:
            raise BoardInputError(f"line 1: malformed placement JSON ({e}).") from e
        bad = [k for k in knights if len(k) != 2]
        if bad:
            raise BoardInputError(f"line 1: knight entries must be [col, row] pairs, got {list(bad[0])}.")
        return Placement.from_squares(dims, knights)
    dims, cells = read_grid(text, "N.")
    return Placement.from_squares(dims, [sq for sq, ch in cells.items() if ch == "N"])


def format_placement(p: Placement) -> str:
    """Inverse of :func:`parse_placement` for the grid format."""
    lines = [f"{p.dims.cols} {p.dims.rows}"]
    for row in range(p.dims.rows, 0, -1):
        lines.append(
            "".join("N" if p.has_knight((col, row)) else "." for col in range(1, p.dims.cols + 1))
        )
    return "\n".join(lines) + "\n"


def render_board(p: Placement, title: str | None = None) -> str:
    """Human-readable board art with row and column labels."""
    width = len(str(p.dims.rows))
    out = [title] if title else []
    for row in range(p.dims.rows, 0, -1):
        cells = " ".join("N" if p.has_knight((col, row)) else "." for col in range(1, p.dims.cols + 1))
        out.append(f"{row:>{width}} | {cells}")
    out.append(" " * width + " +-" + "--" * p.dims.cols)
    out.append(" " * (width + 3) + " ".join(str(c % 10) for c in range(1, p.dims.cols + 1)))
    return "\n".join(out)
