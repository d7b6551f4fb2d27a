# cli.py
"""Command-line entry point: ``python -m perfdom <command> ...``.

Commands print board art by default and JSON with ``--json``. Exit codes:
0 success, 1 bad input (or a ``reproduce`` mismatch), 2 resource guard.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import pandas as pd
from pydantic import BaseModel

from perfdom.band_analyzer import (
    boundary_strip_search,
    build_transition_graph,
    classify_infinite_boards,
    classify_one_sided,
    classify_two_sided,
)
from perfdom.board import (
    BoardDims,
    Placement,
    canonicalize,
    format_placement,
    parse_placement,
    render_board,
)
from perfdom.config import load_settings
from perfdom.errors import BoardInputError, PerfDomError, ResourceGuardError
from perfdom.exact_solver import (
    CORNER_CASE_SETS,
    ConstraintGrid,
    SubBoard,
    complete_partial,
    enumerate_minimal_subboard_dominators,
    enumerate_pds,
    gamma_p_one_row,
    gamma_p_two_rows_formula,
    parse_constraints,
    solve_gamma_p,
)
from perfdom.patterns import (
    band_pattern,
    construct_2rows,
    construct_3rows,
    construct_4rows,
    construct_zz_pattern,
    knight_neighbor_counts,
    three_row_bound,
    unique_domination_counts,
    verify_periodic,
)
from perfdom.verifier import diagnose, is_efficient_dominating, is_perfect_dominating
from perfdom.window_search import (
    ZZ_CASE_PINS,
    Verdict,
    assumption_search,
    isolated_knight_search,
    parse_pins,
)

logger = logging.getLogger("perfdom.cli")

FORMAT_VERSION = 1


def _emit(args: argparse.Namespace, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps({"format_version": FORMAT_VERSION, **payload}, indent=2))
    else:
        print(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise BoardInputError(f"Cannot read {path}: {e}") from e


# -------------------------
# Commands
# -------------------------
def cmd_solve(args: argparse.Namespace) -> int:
    dims = BoardDims(cols=args.n, rows=args.m)
    result = solve_gamma_p(dims, max_rows=args.max_rows)
    _emit(
        args,
        result.to_json(),
        render_board(result.witness, f"gamma_p(KN_{{{dims.cols},{dims.rows}}}) = {result.gamma_p}"
                     + (" (only trivial)" if result.only_trivial else "")),
    )
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    placement = parse_placement(_read(args.file))
    diag = diagnose(placement)
    efficient = is_efficient_dominating(placement)
    lines = [render_board(placement), f"perfect: {str(diag.perfect).lower()}", f"efficient: {str(efficient).lower()}"]
    lines += [f"undominated: {tuple(sq)}" for sq in diag.undominated]
    lines += [f"overdominated: {tuple(sq)} x{count}" for sq, count in diag.overdominated]
    _emit(args, {**diag.to_json(), "efficient": efficient, "size": placement.size}, "\n".join(lines))
    return 0


def cmd_enumerate(args: argparse.Namespace) -> int:
    dims = BoardDims(cols=args.n, rows=args.m)
    found = enumerate_pds(dims, args.max_size, up_to_symmetry=args.canonical, max_rows=args.max_rows, limit=args.limit)
    text = [f"{len(found)} perfect dominating set(s) of KN_{{{dims.cols},{dims.rows}}} with <= {args.max_size} knights"]
    text += [render_board(p, f"#{i + 1} ({p.size} knights)") for i, p in enumerate(found)]
    _emit(args, {"count": len(found), "placements": [p.to_json() for p in found]}, "\n\n".join(text))
    return 0


def cmd_complete(args: argparse.Namespace) -> int:
    grid = parse_constraints(_read(args.constraints))
    outcome = complete_partial(grid.dims, grid, max_rows=args.max_rows)
    if outcome.nontrivial:
        text = render_board(outcome.witness, f"witness with {outcome.witness.size} knights")
    else:
        text = "no nontrivial perfect dominating set satisfies the constraints"
    _emit(args, outcome.to_json(), text)
    return 0


def cmd_band(args: argparse.Namespace) -> int:
    if args.classify_all:
        entries = classify_infinite_boards(
            max_band_rows=args.max_band_rows, strip_k_max=args.kmax, window_radius=args.window_radius,
        )
        rows = [e.model_dump(mode="json") for e in entries]
        text = "\n".join(
            f"{e.board:10} {e.outcome:14} {str(e.density) if e.density is not None else '-':6} {e.evidence}"
            for e in entries
        )
        _emit(args, {"boards": rows}, text)
        return 0
    if args.strip:
        outcome = boundary_strip_search(args.kmax)
        text = "\n".join(f"k={k}: {v} nontrivial construction(s)" for k, v in outcome.survivors_by_k.items())
        text += f"\n{'all dead' if outcome.all_dead else 'alive'} at k={outcome.k}"
        _emit(args, outcome.to_json(), text)
        return 0
    if args.rows is None:
        raise BoardInputError("band needs --rows, --strip or --classify-all.")
    classify = classify_two_sided if args.side == "z" else classify_one_sided
    result = classify(args.rows, max_band_rows=args.max_band_rows)
    text = f"KN_{{{'Z' if args.side == 'z' else 'N'},{args.rows}}}: {result.outcome.value}"
    if result.nontrivial:
        text += f", minimum density {result.min_density}, period {len(result.witness_cycle)}"
        if result.transient_only:
            text += " (transient only)"
    _emit(args, result.to_json(), text)
    return 0


def cmd_pattern(args: argparse.Namespace) -> int:
    family = args.family
    if family == "zz" or family == "band":
        pattern = construct_zz_pattern() if family == "zz" else band_pattern(args.rows)
        text = (
            f"periods {pattern.period_vectors}, offsets {[tuple(o) for o in pattern.knight_offsets]}, "
            f"density {pattern.density}, verified {verify_periodic(pattern)}"
        )
        _emit(args, pattern.to_json(), text)
        return 0
    if args.n is None:
        raise BoardInputError(f"pattern --family {family} needs --n.")
    build = {"2rows": construct_2rows, "3rows": construct_3rows, "4rows": construct_4rows}[family]
    placement = build(args.n)
    if args.grid:
        text = format_placement(placement).rstrip("\n")
    else:
        text = render_board(placement, f"{family} n={args.n}: {placement.size} knights")
    _emit(args, {"placement": placement.to_json(), "size": placement.size}, text)
    return 0


def cmd_window(args: argparse.Namespace) -> int:
    if args.pins:
        outcome = assumption_search(parse_pins(_read(args.pins)), args.radius, args.limit)
    elif args.case:
        outcome = assumption_search(ZZ_CASE_PINS[args.case], args.radius, args.limit)
    else:
        outcome = isolated_knight_search(args.radius, args.limit)
    text = f"{outcome.verdict.value} at radius {outcome.radius} after {outcome.nodes} nodes"
    if outcome.witness:
        text += "\n" + outcome.witness
    _emit(args, outcome.to_json(), text)
    return 0


# -------------------------
# Reproduction report
# -------------------------
class ClaimStatus(str, Enum):
    MATCH = "match"
    WITHIN_BOUND = "within-bound"
    NEW_RESULT = "new-result"
    MISMATCH = "mismatch"
    INCONCLUSIVE = "inconclusive"


class ReproduceEntry(BaseModel):
    claim_id: str
    statement: str
    computed: str
    expected: Optional[str] = None
    status: ClaimStatus


class ReproduceReport(BaseModel):
    entries: List[ReproduceEntry]
    elapsed: Dict[str, float] = {}

    @property
    def mismatches(self) -> List[ReproduceEntry]:
        return [e for e in self.entries if e.status is ClaimStatus.MISMATCH]

    def to_json(self) -> dict:
        return {"format_version": FORMAT_VERSION, **self.model_dump(mode="json")}

    def to_markdown(self) -> str:
        lines = ["| claim | statement | computed | expected | status |", "|---|---|---|---|---|"]
        for e in self.entries:
            lines.append(f"| {e.claim_id} | {e.statement} | {e.computed} | {e.expected or '-'} | {e.status.value} |")
        counts = pd.Series([e.status.value for e in self.entries]).value_counts()
        lines.append("")
        lines.append(", ".join(f"{status}: {n}" for status, n in counts.items()))
        return "\n".join(lines)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([e.model_dump(mode="json") for e in self.entries])


def _entry(claim_id: str, statement: str, computed, expected=None, ok: Optional[bool] = None,
           status: Optional[ClaimStatus] = None) -> ReproduceEntry:
    if status is None:
        status = ClaimStatus.MATCH if (ok if ok is not None else computed == expected) else ClaimStatus.MISMATCH
    return ReproduceEntry(
        claim_id=claim_id,
        statement=statement,
        computed=str(computed),
        expected=None if expected is None else str(expected),
        status=status,
    )


def _guarded(claim_id: str, statement: str, run: Callable[[], ReproduceEntry]) -> ReproduceEntry:
    try:
        return run()
    except ResourceGuardError as e:
        logger.warning("%s skipped: %s", claim_id, e)
        return ReproduceEntry(claim_id=claim_id, statement=statement, computed=str(e), status=ClaimStatus.INCONCLUSIVE)


def _scope_5x5() -> List[ReproduceEntry]:
    entries = []
    for n in range(5, 9):
        for m in range(n, 9):
            stmt = f"gamma_p(KN_{{{n},{m}}}) = {n * m}"
            entries.append(_guarded(f"5x5/{n}x{m}", stmt, lambda n=n, m=m, stmt=stmt: _entry(
                f"5x5/{n}x{m}", stmt, solve_gamma_p(BoardDims(cols=n, rows=m)).gamma_p, n * m)))

    board = BoardDims(cols=5, rows=5)
    classes = enumerate_minimal_subboard_dominators(board, SubBoard(cols=3, rows=3))
    expected = _case_set_classes(board)
    found = {p.bits for p in classes}
    entries.append(_entry(
        "5x5/constructions", "13 minimal ways to dominate the 3x3 corner",
        f"{len(classes)} classes" + ("" if found == expected else f": {[p.to_json()['knights'] for p in classes]}"),
        "13 classes", ok=len(classes) == 13 and found == expected,
    ))
    for i, case in enumerate(CORNER_CASE_SETS, start=1):
        diag = diagnose(Placement.from_squares(board, case.knights))
        entries.append(_entry(
            f"5x5/case{case.case}.{i}", f"case {case.case} set leaves {case.forcing_square} undominated",
            case.forcing_square in [tuple(sq) for sq in diag.undominated], True,
        ))
    case1 = CORNER_CASE_SETS[0]
    outcome = complete_partial(board, ConstraintGrid.from_squares(board, knights=case1.knights))
    entries.append(_entry("5x5/case1-completion", "case 1 set has no nontrivial completion on 5x5",
                          "witness" if outcome.nontrivial else "no-nontrivial", "no-nontrivial"))
    big = BoardDims(cols=8, rows=7)
    case3 = CORNER_CASE_SETS[-1]
    pinned = case3.knights + ((2, 7),)
    extended = Placement.from_squares(big, pinned)
    entries.append(_entry("5x5/case3-extension", "case 3 set plus (2,7) leaves (5,5) undominated on 8x7",
                          (5, 5) in [tuple(sq) for sq in diagnose(extended).undominated], True))

    stmt = "case 3 set plus (2,7) has no nontrivial completion on 8x7"

    def _case3_completion() -> ReproduceEntry:
        found = complete_partial(big, ConstraintGrid.from_squares(big, knights=pinned))
        return _entry("5x5/case3-completion", stmt, "witness" if found.nontrivial else "no-nontrivial", "no-nontrivial")

    entries.append(_guarded("5x5/case3-completion", stmt, _case3_completion))
    return entries


def _case_set_classes(board: BoardDims) -> set:
    out = set()
    for case in CORNER_CASE_SETS:
        p = Placement.from_squares(board, case.knights)
        mirrored = Placement.from_squares(board, [(r, c) for c, r in case.knights])
        out.add(min(p.bits, mirrored.bits))
    return out


def _scope_2rows() -> List[ReproduceEntry]:
    entries = []
    for n in range(1, 9):
        entries.append(_entry(f"1row/{n}", f"gamma_p(KN_{{{n},1}}) = {n}",
                              solve_gamma_p(BoardDims(cols=n, rows=1)).gamma_p, gamma_p_one_row(n)))
    for n in range(1, 26):
        formula = gamma_p_two_rows_formula(n)
        entries.append(_entry(f"2rows/{n}", f"gamma_p(KN_{{{n},2}}) = {formula}",
                              solve_gamma_p(BoardDims(cols=n, rows=2)).gamma_p, formula))
        built = construct_2rows(n)
        entries.append(_entry(f"2rows/construct/{n}", f"2-row construction for n={n} is perfect with {formula} knights",
                              (is_perfect_dominating(built), built.size), (True, formula)))
    return entries


def _scope_3rows() -> List[ReproduceEntry]:
    entries = []
    for k in range(0, 4):
        for residue in (0, 4, 5, 6, 7):
            n = 8 * k + residue
            if n < 4:
                continue
            bound = three_row_bound(n)
            built = construct_3rows(n)
            entries.append(_entry(f"3rows/construct/{n}", f"construction for n={n} is perfect with {bound} knights",
                                  (is_perfect_dominating(built), built.size), (True, bound)))
            gamma = solve_gamma_p(BoardDims(cols=n, rows=3)).gamma_p
            status = ClaimStatus.MATCH if gamma == bound else (
                ClaimStatus.WITHIN_BOUND if gamma < bound else ClaimStatus.MISMATCH)
            entries.append(_entry(f"3rows/{n}", f"gamma_p(KN_{{{n},3}}) <= {bound}", gamma, f"<= {bound}", status=status))
    return entries


def _scope_open_3rows() -> List[ReproduceEntry]:
    entries = []
    for n in range(1, 33):
        if n % 8 not in (1, 2, 3):
            continue
        result = solve_gamma_p(BoardDims(cols=n, rows=3))
        entries.append(_entry(f"open-3rows/{n}", f"gamma_p(KN_{{{n},3}}) (open case)", result.gamma_p,
                              status=ClaimStatus.NEW_RESULT))
    return entries


FOUR_ROW_VALUES = {4: 8, 5: 8, 6: 8, 7: 28, 8: 16, 9: 36, 10: 16, 11: 16, 12: 16}


def _scope_4rows() -> List[ReproduceEntry]:
    entries = []
    for n, value in FOUR_ROW_VALUES.items():
        entries.append(_entry(f"4rows/{n}", f"gamma_p(KN_{{{n},4}}) = {value}",
                              solve_gamma_p(BoardDims(cols=n, rows=4)).gamma_p, value))
    for k in range(7, 13):
        entries.append(_entry(f"4rows/even/{2 * k}", f"gamma_p(KN_{{{2 * k},4}}) = {4 * k}",
                              solve_gamma_p(BoardDims(cols=2 * k, rows=4)).gamma_p, 4 * k))
    for k in range(6, 11):
        n = 2 * k + 1
        entries.append(_entry(f"4rows/odd/{n}", f"gamma_p(KN_{{{n},4}}) = {4 * n}",
                              solve_gamma_p(BoardDims(cols=n, rows=4)).gamma_p, 4 * n))
    dims = BoardDims(cols=14, rows=4)
    found = enumerate_pds(dims, 28, up_to_symmetry=True)
    pattern = canonicalize(construct_4rows(14))
    entries.append(_entry("4rows/unique-14", "one perfect dominating set of KN_{14,4} with 28 knights, up to symmetry",
                          f"{len(found)} class(es)", "1 class(es)",
                          ok=len(found) == 1 and found[0].bits == pattern.bits))
    return entries


BAND_EXPECTED: Dict[int, Optional[Fraction]] = {2: Fraction(1, 3), 3: Fraction(5, 12), 4: Fraction(1, 2)}


def _scope_bands() -> List[ReproduceEntry]:
    entries = []
    top = load_settings().max_band_rows
    for m in range(2, top + 1):
        stmt = f"bands m={m}"
        try:
            graph = build_transition_graph(m)
        except ResourceGuardError as e:
            entries.append(ReproduceEntry(claim_id=f"bands/{m}", statement=stmt, computed=str(e),
                                          status=ClaimStatus.INCONCLUSIVE))
            continue
        for side, classify in (("Z", classify_two_sided), ("N", classify_one_sided)):
            result = classify(m, graph=graph)
            claim = f"bands/{side}/{m}"
            if m in BAND_EXPECTED:
                expected = BAND_EXPECTED[m]
                density = result.min_density
                if not result.nontrivial:
                    status = ClaimStatus.MISMATCH
                elif m == 3:
                    status = ClaimStatus.WITHIN_BOUND if density <= expected else ClaimStatus.MISMATCH
                else:
                    status = ClaimStatus.MATCH if density == expected else ClaimStatus.MISMATCH
                bound = f"<= {expected}" if m == 3 else str(expected)
                entries.append(_entry(claim, f"KN_{{{side},{m}}} minimum density {bound}", density, bound, status=status))
            else:
                entries.append(_entry(claim, f"KN_{{{side},{m}}} has only the trivial set",
                                      result.outcome.value, "only-trivial"))
    strip = boundary_strip_search(12)
    if not strip.all_dead:
        status = ClaimStatus.MISMATCH
    else:
        status = ClaimStatus.MATCH if strip.k == 12 else ClaimStatus.WITHIN_BOUND
    entries.append(_entry("bands/strip", "boundary strip constructions all die by k=12",
                          f"{'all dead' if strip.all_dead else 'alive'} at k={strip.k}", "all dead at k=12", status=status))
    return entries


def _scope_zz() -> List[ReproduceEntry]:
    pattern = construct_zz_pattern()
    entries = [
        _entry("zz/verify", "the plane pattern is perfect dominating", verify_periodic(pattern), True),
        _entry("zz/density", "the plane pattern has density 1/8", pattern.density, Fraction(1, 8)),
        _entry("zz/pairs", "each knight has exactly one knight neighbour",
               sorted(set(knight_neighbor_counts(pattern).values())), [1]),
        _entry("zz/unique", "each knight uniquely dominates 8 squares including itself",
               sorted(set(unique_domination_counts(pattern).values())), [8]),
    ]
    limit = load_settings().node_limit
    searches = [("zz/isolated", "no isolated knight (radius 6)", lambda: isolated_knight_search(6, limit))]
    for name, pins in ZZ_CASE_PINS.items():
        searches.append((f"zz/{name}", f"{name} pins are contradictory (radius 6)",
                         lambda pins=pins: assumption_search(pins, 6, limit)))
    for claim_id, stmt, run in searches:
        outcome = run()
        status = {
            Verdict.UNSAT: ClaimStatus.MATCH,
            Verdict.SAT: ClaimStatus.MISMATCH,
            Verdict.INCONCLUSIVE: ClaimStatus.INCONCLUSIVE,
        }[outcome.verdict]
        entries.append(_entry(claim_id, stmt, f"{outcome.verdict.value} ({outcome.nodes} nodes)", "unsat", status=status))
    return entries


SCOPES: Dict[str, Callable[[], List[ReproduceEntry]]] = {
    "thm5x5": _scope_5x5,
    "2rows": _scope_2rows,
    "3rows": _scope_3rows,
    "open-3rows": _scope_open_3rows,
    "4rows": _scope_4rows,
    "bands": _scope_bands,
    "zz": _scope_zz,
}


def _run_scope(name: str) -> tuple:
    start = time.perf_counter()
    entries = SCOPES[name]()
    return entries, time.perf_counter() - start


def reproduce(scope: str = "all", threads: Optional[int] = None) -> ReproduceReport:
    """Run the named scope (or all of them) and collect the claim entries in fixed order."""
    names = list(SCOPES) if scope == "all" else [scope]
    if any(name not in SCOPES for name in names):
        raise BoardInputError(f"Unknown scope {scope!r}; choose from all, {', '.join(SCOPES)}.")
    workers = min(threads if threads is not None else load_settings().threads, len(names))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_scope, names))
    else:
        results = [_run_scope(name) for name in names]
    entries: List[ReproduceEntry] = []
    elapsed: Dict[str, float] = {}
    for name, (scope_entries, seconds) in zip(names, results):
        entries.extend(scope_entries)
        elapsed[name] = round(seconds, 3)
    report = ReproduceReport(entries=entries, elapsed=elapsed)
    for e in report.mismatches:
        logger.warning("Mismatch: %s computed %s, expected %s", e.claim_id, e.computed, e.expected)
    return report


def cmd_reproduce(args: argparse.Namespace) -> int:
    report = reproduce(args.scope, args.threads)
    if args.csv:
        report.to_frame().to_csv(args.csv, index=False)
        logger.info("Wrote %d entries to %s", len(report.entries), args.csv)
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(report.to_markdown())
    return 1 if report.mismatches else 0


# -------------------------
# Parser
# -------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="perfdom", description="Perfect domination on knights graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, func, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--json", action="store_true", help="emit JSON instead of board art")
        p.set_defaults(func=func)
        return p

    p = command("solve", cmd_solve, "exact gamma_p of an n x m board")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--max-rows", type=int, default=None)

    p = command("verify", cmd_verify, "check a placement file")
    p.add_argument("file")

    p = command("enumerate", cmd_enumerate, "all perfect dominating sets up to a size")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--canonical", action="store_true", help="one representative per symmetry class")
    p.add_argument("--max-rows", type=int, default=None)
    p.add_argument("--limit", type=int, default=None)

    p = command("complete", cmd_complete, "nontrivial completion of a constraint grid")
    p.add_argument("--constraints", required=True)
    p.add_argument("--max-rows", type=int, default=None)

    p = command("band", cmd_band, "infinite band classification")
    p.add_argument("--rows", type=int, default=None)
    p.add_argument("--side", choices=("z", "n"), default="z")
    p.add_argument("--strip", action="store_true")
    p.add_argument("--kmax", type=int, default=12)
    p.add_argument("--classify-all", action="store_true")
    p.add_argument("--max-band-rows", type=int, default=None)
    p.add_argument("--window-radius", type=int, default=6, help="isolated-knight search radius for the plane")

    p = command("pattern", cmd_pattern, "explicit constructions")
    p.add_argument("--family", choices=("2rows", "3rows", "4rows", "zz", "band"), required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--rows", type=int, default=2, help="band height for --family band")
    p.add_argument("--grid", action="store_true", help="print the parseable grid format")

    p = command("window", cmd_window, "finite-window search on the plane")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--pins", default=None)
    p.add_argument("--case", choices=sorted(ZZ_CASE_PINS), default=None)
    p.add_argument("--limit", type=int, default=None)

    p = command("reproduce", cmd_reproduce, "regenerate every claim as a report")
    p.add_argument("--scope", choices=("all", *SCOPES), default="all")
    p.add_argument("--csv", default=None, help="also write the report table to this CSV file")
    p.add_argument("--threads", type=int, default=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceGuardError as e:
        print(f"Resource limit: {e}", file=sys.stderr)
        logger.warning("Resource guard: %s", e)
        return 2
    except PerfDomError as e:
        print(f"Error: {e}", file=sys.stderr)
        logger.error("Input error: %s", e)
        return 1
    except Exception:
        logger.exception("Unexpected failure in %s", args.command)
        raise
