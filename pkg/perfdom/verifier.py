# verifier.py
"""Perfect and efficient domination checks for finite placements."""
from __future__ import annotations

import logging
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict

from perfdom.board import Placement, SquareCoord, neighbor_masks

logger = logging.getLogger("perfdom.verifier")


class DominationDiagnostic(BaseModel):
    """Non-knight squares with no dominator, and those with two or more."""

    model_config = ConfigDict(frozen=True)

    undominated: List[SquareCoord]
    overdominated: List[Tuple[SquareCoord, int]]

    @property
    def perfect(self) -> bool:
        return not self.undominated and not self.overdominated

    def to_json(self) -> dict:
        return {
            "perfect": self.perfect,
            "undominated": [[sq.col, sq.row] for sq in self.undominated],
            "overdominated": [[sq.col, sq.row, count] for sq, count in self.overdominated],
        }


def is_perfect_dominating(p: Placement) -> bool:
    """Every square outside the knight set has exactly one knight neighbour.

    Knight squares themselves are unconstrained.
    """
    bits = p.bits
    for v, mask in enumerate(neighbor_masks(p.dims)):
        if bits >> v & 1:
            continue
        if (bits & mask).bit_count() != 1:
            return False
    return True


def is_efficient_dominating(p: Placement) -> bool:
    """Every square, knight or not, has exactly one knight in N[v]."""
    bits = p.bits
    for v, mask in enumerate(neighbor_masks(p.dims)):
        if (bits & (mask | 1 << v)).bit_count() != 1:
            return False
    return True


def diagnose(p: Placement) -> DominationDiagnostic:
    """Exhaustive, sorted lists of the squares violating perfect domination."""
    bits = p.bits
    undominated: List[SquareCoord] = []
    overdominated: List[Tuple[SquareCoord, int]] = []
    for v, mask in enumerate(neighbor_masks(p.dims)):
        if bits >> v & 1:
            continue
        count = (bits & mask).bit_count()
        if count == 0:
            undominated.append(p.dims.square(v))
        elif count >= 2:
            overdominated.append((p.dims.square(v), count))
    # bit order is column-major, which is already (col, row) order
    diag = DominationDiagnostic(undominated=undominated, overdominated=overdominated)
    logger.debug(
        "diagnose %s: %d undominated, %d overdominated",
        p.dims, len(undominated), len(overdominated),
    )
    return diag
