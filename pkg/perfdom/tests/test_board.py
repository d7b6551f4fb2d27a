# tests/test_board.py
import json
import random

import pytest

from perfdom.board import (
    BoardDims,
    Placement,
    SquareCoord,
    Symmetry,
    apply_symmetry,
    canonicalize,
    closed_neighbors,
    format_placement,
    knight_neighbors,
    neighbor_masks,
    orbit,
    parse_placement,
    read_grid,
    render_board,
    symmetry_group,
    transform,
    transpose,
)
from perfdom.errors import BoardInputError


def _random_placement(rng: random.Random, max_side: int = 6) -> Placement:
    dims = BoardDims(cols=rng.randint(1, max_side), rows=rng.randint(1, max_side))
    return Placement(dims=dims, bits=rng.getrandbits(dims.cells))


def test_corner_has_two_neighbors():
    dims = BoardDims(cols=8, rows=8)
    assert knight_neighbors(dims, (1, 1)) == {SquareCoord(2, 3), SquareCoord(3, 2)}
    assert closed_neighbors(dims, (1, 1)) == {SquareCoord(1, 1), SquareCoord(2, 3), SquareCoord(3, 2)}


def test_center_of_3x3_is_isolated():
    assert knight_neighbors(BoardDims(cols=3, rows=3), (2, 2)) == frozenset()


def test_off_board_square_is_rejected():
    with pytest.raises(BoardInputError):
        knight_neighbors(BoardDims(cols=4, rows=4), (5, 1))
    with pytest.raises(BoardInputError):
        Placement.from_squares(BoardDims(cols=4, rows=4), [(0, 2)])


@pytest.mark.parametrize("cols,rows", [(0, 4), (4, 0), (-1, 3)])
def test_nonpositive_dims_are_rejected(cols, rows):
    with pytest.raises(BoardInputError):
        BoardDims(cols=cols, rows=rows)


def test_adjacency_is_symmetric_and_matches_masks():
    # 1000 random squares on random boards: u in N(v) iff v in N(u)
    rng = random.Random(1234)
    for _ in range(1000):
        dims = BoardDims(cols=rng.randint(1, 10), rows=rng.randint(1, 10))
        v = SquareCoord(rng.randint(1, dims.cols), rng.randint(1, dims.rows))
        masks = neighbor_masks(dims)
        for u in knight_neighbors(dims, v):
            assert v in knight_neighbors(dims, u)
            assert masks[dims.index(u)] >> dims.index(v) & 1
        assert bin(masks[dims.index(v)]).count("1") == len(knight_neighbors(dims, v))


def test_column_major_bit_layout():
    dims = BoardDims(cols=3, rows=4)
    p = Placement.from_squares(dims, [(2, 1), (3, 4)])
    assert p.bits == (1 << 4) | (1 << 11)
    assert p.column(2) == 0b0001
    assert p.column(3) == 0b1000
    assert Placement.from_columns(dims, p.columns()) == p


def test_from_columns_needs_every_column():
    with pytest.raises(BoardInputError):
        Placement.from_columns(BoardDims(cols=3, rows=2), [1, 2])


def test_symmetry_group_sizes():
    assert len(symmetry_group(BoardDims(cols=5, rows=3))) == 4
    assert len(symmetry_group(BoardDims(cols=5, rows=5))) == 8
    with pytest.raises(BoardInputError):
        apply_symmetry(Symmetry.ROTATE_90, BoardDims(cols=5, rows=3), (1, 1))


def test_rotation_moves_corner():
    dims = BoardDims(cols=4, rows=4)
    assert apply_symmetry(Symmetry.ROTATE_90, dims, (1, 1)) == (4, 1)
    assert apply_symmetry(Symmetry.ROTATE_180, dims, (1, 1)) == (4, 4)


def test_symmetries_preserve_adjacency():
    dims = BoardDims(cols=5, rows=5)
    for g in symmetry_group(dims):
        for sq in dims.squares():
            image = {apply_symmetry(g, dims, u) for u in knight_neighbors(dims, sq)}
            assert image == knight_neighbors(dims, apply_symmetry(g, dims, sq))


def test_canonicalize_is_idempotent_and_orbit_invariant():
    rng = random.Random(99)
    for _ in range(1000):
        p = _random_placement(rng)
        c = canonicalize(p)
        assert canonicalize(c) == c
        g = rng.choice(symmetry_group(p.dims))
        assert canonicalize(transform(p, g)) == c
        assert c.bits == min(q.bits for q in orbit(p))


def test_transpose_swaps_dims():
    p = Placement.from_squares(BoardDims(cols=5, rows=2), [(4, 1), (1, 2)])
    t = transpose(p)
    assert t.dims == BoardDims(cols=2, rows=5)
    assert set(t.knights) == {SquareCoord(1, 4), SquareCoord(2, 1)}
    assert transpose(t) == p


def test_grid_format_round_trip():
    rng = random.Random(7)
    for _ in range(50):
        p = _random_placement(rng, max_side=9)
        assert parse_placement(format_placement(p)) == p


def test_grid_is_top_row_first():
    p = parse_placement("3 2\nN..\n..N\n")
    assert set(p.knights) == {SquareCoord(1, 2), SquareCoord(3, 1)}


def test_json_placement_is_accepted():
    text = json.dumps({"cols": 4, "rows": 3, "knights": [[1, 1], [4, 3]]})
    p = parse_placement(text)
    assert p.dims == BoardDims(cols=4, rows=3)
    assert p.to_json()["knights"] == [[1, 1], [4, 3]]


@pytest.mark.parametrize("entry", [[1, 2, 3], [1], []])
def test_json_knights_must_be_pairs(entry):
    text = json.dumps({"cols": 4, "rows": 3, "knights": [[1, 1], entry]})
    with pytest.raises(BoardInputError, match="pairs"):
        parse_placement(text)


def test_bad_grid_reports_line_number():
    with pytest.raises(BoardInputError, match="line 3"):
        parse_placement("3 2\nN..\nN.Q\n")
    with pytest.raises(BoardInputError, match="line 2"):
        parse_placement("4 2\nN..\n....\n")
    with pytest.raises(BoardInputError, match="line 1"):
        parse_placement("three two\n")


def test_read_grid_accepts_custom_alphabet():
    dims, cells = read_grid("2 1\nNx\n", "N.x")
    assert dims == BoardDims(cols=2, rows=1)
    assert cells[SquareCoord(2, 1)] == "x"


def test_render_board_labels_rows_and_columns():
    art = render_board(Placement.from_squares(BoardDims(cols=3, rows=2), [(1, 1)]), "demo")
    lines = art.splitlines()
    assert lines[0] == "demo"
    assert lines[1] == "2 | . . ."
    assert lines[2] == "1 | N . ."
    assert lines[-1].endswith("1 2 3")
