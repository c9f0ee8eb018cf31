"""Anchor-cell scoring and selection.

The anchor is the one cell whose surrounding patch gets solved directly;
everything else is reached by reflections. Eligibility is hard (bounded,
two non-parallel ridges, at least one ring ridge between consecutive
neighbors); everything on top is a soft composite used to prefer compact,
central, well-conditioned cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import geom
from .errors import NoEligibleAnchorError
from .tessellation import CellId, Tessellation, neighbors

DEGREE_BAND = (4, 7)


@dataclass(frozen=True)
class AnchorPolicy:
    """How to pick among eligible cells: the top composite score or a seeded draw."""

    kind: str
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("best_score", "random_eligible"):
            raise ValueError(f"unknown anchor policy {self.kind!r}")
        if self.kind == "random_eligible" and self.seed is None:
            raise ValueError("random_eligible policy requires a seed")

    @classmethod
    def best_score(cls) -> "AnchorPolicy":
        return cls("best_score")

    @classmethod
    def random_eligible(cls, seed: int) -> "AnchorPolicy":
        return cls("random_eligible", seed)


@dataclass(frozen=True)
class AnchorScore:
    """Eligibility plus the soft criteria entering the composite score.

    ``max_pairwise_parallelism`` is ``1 - min |sin|`` over ridge-direction
    pairs (1 means some pair is parallel); its complement is the angle
    spread used by the composite.
    """

    cell: CellId
    eligible: bool
    degree: int
    min_edge_ratio: float
    max_pairwise_parallelism: float
    centrality: float
    composite: float


def composite_score(
    min_edge_ratio: float, centrality: float, degree: int, angle_spread: float
) -> float:
    """Fixed-weight blend; improving any single criterion never lowers it."""
    band = 1.0 if DEGREE_BAND[0] <= degree <= DEGREE_BAND[1] else 0.5
    return 0.4 * min_edge_ratio + 0.3 * (1.0 - centrality) + 0.2 * band + 0.1 * angle_spread


def score_cell(t: Tessellation, c: CellId) -> AnchorScore:
    """Score one cell; never raises on degenerate geometry, just marks ineligible."""
    cell = t.cells[c]
    degree = len(cell.ridges)
    dirs = []
    lengths = []
    degenerate = False
    for rid in cell.ridges:
        try:
            dirs.append(t.ridge_line(rid).dir)
        except geom.DegenerateRidgeError:
            degenerate = True
            continue
        ln = t.ridge_length(rid)
        if math.isfinite(ln):
            lengths.append(ln)
    min_sin = 1.0
    max_sin = 0.0
    for i in range(len(dirs)):
        for j in range(i + 1, len(dirs)):
            s = abs(dirs[i][0] * dirs[j][1] - dirs[i][1] * dirs[j][0])
            min_sin = min(min_sin, s)
            max_sin = max(max_sin, s)
    if len(dirs) < 2:
        min_sin = 0.0
    min_edge_ratio = (min(lengths) / max(lengths)) if lengths else 0.0
    centrality = _centrality(t, c)
    angle_spread = max(0.0, min(1.0, min_sin))
    has_ring = cell.bounded and _has_ring_pair(t, c)
    eligible = (
        cell.bounded
        and not degenerate
        and max_sin > geom.PARALLEL_TOL
        and has_ring
    )
    return AnchorScore(
        cell=c,
        eligible=eligible,
        degree=degree,
        min_edge_ratio=min_edge_ratio,
        max_pairwise_parallelism=1.0 - angle_spread,
        centrality=centrality,
        composite=composite_score(min_edge_ratio, centrality, degree, angle_spread),
    )


def _has_ring_pair(t: Tessellation, c: CellId) -> bool:
    nb = [cid for cid, _ in neighbors(t, c)]
    k = len(nb)
    return any(t.ridge_between(nb[i], nb[(i + 1) % k]) is not None for i in range(k))


def _centrality(t: Tessellation, c: CellId) -> float:
    """Distance from the cell's vertex centroid to the diagram center, in [0, 1]."""
    vids = sorted({v for rid in t.cells[c].ridges for v in t.ridges[rid].vertex_ids()})
    if not vids:
        return 1.0
    cx = sum(t.vertices[v].x for v in vids) / len(vids)
    cy = sum(t.vertices[v].y for v in vids) / len(vids)
    x0, y0, x1, y1 = t.bbox()
    half_diag = 0.5 * t.diameter()
    d = math.hypot(cx - 0.5 * (x0 + x1), cy - 0.5 * (y0 + y1))
    return min(1.0, d / half_diag)


def eligible_cells(t: Tessellation) -> list[CellId]:
    """Cell ids passing the hard criteria, ascending."""
    return [c for c in range(len(t.cells)) if score_cell(t, c).eligible]


def select_anchor(t: Tessellation, policy: AnchorPolicy = AnchorPolicy.best_score()) -> CellId:
    """Pick the anchor cell; raises NoEligibleAnchorError when nothing qualifies."""
    scores = [score_cell(t, c) for c in range(len(t.cells))]
    elig = [s for s in scores if s.eligible]
    if not elig:
        raise NoEligibleAnchorError(
            f"none of the {len(t.cells)} cells is a usable anchor"
        )
    if policy.kind == "best_score":
        # ties break toward the lowest cell id
        best = max(elig, key=lambda s: (s.composite, -s.cell))
        return best.cell
    rng = np.random.default_rng(policy.seed)
    return elig[int(rng.integers(len(elig)))].cell
