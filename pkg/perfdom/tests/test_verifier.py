# tests/test_verifier.py
import random

from perfdom.board import (
    BoardDims,
    Placement,
    SquareCoord,
    knight_neighbors,
    parse_placement,
    symmetry_group,
    transform,
)
from perfdom.verifier import diagnose, is_efficient_dominating, is_perfect_dominating


def _count_knight_neighbors(p: Placement, sq) -> int:
    return sum(1 for u in knight_neighbors(p.dims, sq) if p.has_knight(u))


def test_full_board_is_always_perfect():
    for cols in range(1, 6):
        for rows in range(1, 6):
            assert is_perfect_dominating(Placement.full(BoardDims(cols=cols, rows=rows)))


def test_empty_board_is_never_perfect():
    # every square needs exactly one knight neighbour
    assert not is_perfect_dominating(Placement.empty(BoardDims(cols=3, rows=2)))


def test_fixture_14x4_is_perfect(fixtures_dir):
    p = parse_placement((fixtures_dir / "kn_14x4.txt").read_text())
    assert p.dims == BoardDims(cols=14, rows=4)
    assert p.size == 28
    assert is_perfect_dominating(p)
    assert diagnose(p).perfect


def test_knight_squares_are_unconstrained():
    # on 3x2 the middle column is isolated, so only the full board works;
    # its knights see each other, which perfect domination ignores
    p = Placement.full(BoardDims(cols=3, rows=2))
    assert is_perfect_dominating(p)
    assert not is_efficient_dominating(p)


def test_efficient_implies_perfect():
    rng = random.Random(2024)
    efficient = 0
    for _ in range(1000):
        dims = BoardDims(cols=rng.randint(1, 5), rows=rng.randint(1, 5))
        p = Placement(dims=dims, bits=rng.getrandbits(dims.cells))
        if is_efficient_dominating(p):
            efficient += 1
            assert is_perfect_dominating(p)
    # a knight alone on 1x1 is efficient, so the sample is never vacuous
    assert efficient > 0


def test_verifier_matches_definition():
    rng = random.Random(17)
    for _ in range(1000):
        dims = BoardDims(cols=rng.randint(1, 6), rows=rng.randint(1, 6))
        p = Placement(dims=dims, bits=rng.getrandbits(dims.cells))
        expected = all(
            p.has_knight(sq) or _count_knight_neighbors(p, sq) == 1 for sq in dims.squares()
        )
        assert is_perfect_dominating(p) == expected
        assert diagnose(p).perfect == expected


def test_perfect_domination_is_symmetry_invariant():
    rng = random.Random(88)
    for _ in range(1000):
        dims = BoardDims(cols=rng.randint(1, 6), rows=rng.randint(1, 6))
        p = Placement(dims=dims, bits=rng.getrandbits(dims.cells))
        perfect = is_perfect_dominating(p)
        for g in symmetry_group(dims):
            image = transform(p, g)
            assert image.size == p.size
            assert is_perfect_dominating(image) == perfect
            assert diagnose(image).perfect == perfect


def test_diagnose_lists_every_violation():
    dims = BoardDims(cols=3, rows=3)
    p = Placement.from_squares(dims, [(1, 1), (3, 2)])
    diag = diagnose(p)
    # (1,1) hits (2,3),(3,2); (3,2) hits (1,1),(1,3)
    assert SquareCoord(2, 2) in diag.undominated
    assert diag.overdominated == []
    assert set(diag.undominated) == {
        SquareCoord(1, 2), SquareCoord(2, 1), SquareCoord(2, 2), SquareCoord(3, 1), SquareCoord(3, 3),
    }
    payload = diag.to_json()
    assert payload["perfect"] is False
    assert [1, 2] in payload["undominated"]


def test_diagnose_reports_counts():
    dims = BoardDims(cols=3, rows=3)
    # (2,1) is attacked by both (1,3) and (3,3)
    p = Placement.from_squares(dims, [(1, 3), (3, 3)])
    diag = diagnose(p)
    assert (SquareCoord(2, 1), 2) in diag.overdominated
    assert diag.to_json()["overdominated"] == [[2, 1, 2]]
