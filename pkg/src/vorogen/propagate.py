"""Spread generators outward from the solved patch by ridge reflections.

A known generator g of cell A determines the generator of any neighbor B as
the mirror image of g across the shared ridge line. Propagation runs as a
layered breadth-first sweep: layer 0 is the patch, and a cell enters layer
d + 1 only through ridges from layer-d cells, never sideways within a layer,
so every cell's depth equals its ridge distance from the patch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import geom
from .errors import UnreachableCellsError
from .geom import Point2
from .solver import PatchSolution
from .tessellation import CellId, RidgeId, Tessellation, neighbors


@dataclass(frozen=True)
class FrontierPolicy:
    """Which incoming ridge to reflect through when a cell has several.

    ``first`` keeps the discovery order (lowest source cell id, then that
    cell's boundary order), ``random`` draws one with a seeded generator,
    ``longest`` prefers the longest shared ridge.
    """

    kind: str
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("first", "random", "longest"):
            raise ValueError(f"unknown frontier policy {self.kind!r}")
        if self.kind == "random" and self.seed is None:
            raise ValueError("random frontier policy requires a seed")

    @classmethod
    def first(cls) -> "FrontierPolicy":
        return cls("first")

    @classmethod
    def random(cls, seed: int) -> "FrontierPolicy":
        return cls("random", seed)

    @classmethod
    def longest(cls) -> "FrontierPolicy":
        return cls("longest")


@dataclass(frozen=True)
class MergePolicy:
    """Whether to use one incoming reflection or average them all.

    ``first`` takes the single ridge chosen by the frontier policy.
    ``weighted`` averages the reflections through every incoming ridge,
    weighted by ridge length (rays count with their length clipped to the
    vertex bounding box). On exact input all candidates agree, so the two
    policies differ only through rounding.
    """

    kind: str

    def __post_init__(self):
        if self.kind not in ("first", "weighted"):
            raise ValueError(f"unknown merge policy {self.kind!r}")

    @classmethod
    def first(cls) -> "MergePolicy":
        return cls("first")

    @classmethod
    def weighted(cls) -> "MergePolicy":
        return cls("weighted")


@dataclass(frozen=True)
class PropagationTrace:
    """What the sweep did: finalization order, per-cell depth and fan-in.

    ``order`` holds one (cell, source cell, ridge) triple per non-patch cell,
    in finalization order; a source is always finalized before its target.
    """

    order: tuple[tuple[CellId, CellId, RidgeId], ...]
    depth: dict[CellId, int]
    candidates: dict[CellId, int]
    reflect_calls: int

    @property
    def max_depth(self) -> int:
        return max(self.depth.values(), default=0)

    @property
    def mean_depth(self) -> float:
        return sum(self.depth.values()) / len(self.depth) if self.depth else 0.0


def reflect_into(t: Tessellation, rid: RidgeId, p) -> Point2:
    """Mirror a known generator across ridge ``rid`` to get the neighbor's."""
    return geom.reflect_point(p, t.ridge_line(rid))


def _ridge_weight(t: Tessellation, rid: RidgeId) -> float:
    ln = t.ridge_length(rid)
    if math.isfinite(ln):
        return ln
    r = t.ridges[rid]
    v = t.vertices[r.v0]
    x0, y0, x1, y1 = t.bbox()
    exit_param = math.inf
    for p, d, lo, hi in ((v.x, r.ray_dir[0], x0, x1), (v.y, r.ray_dir[1], y0, y1)):
        if d != 0.0:
            exit_param = min(exit_param, max((lo - p) / d, (hi - p) / d))
    if not math.isfinite(exit_param):
        return 0.0
    return max(0.0, exit_param)


def _choose(
    cands: list[tuple[CellId, RidgeId]],
    policy: FrontierPolicy,
    rng,
    t: Tessellation,
) -> tuple[CellId, RidgeId]:
    if policy.kind == "first" or len(cands) == 1:
        return cands[0]
    if policy.kind == "random":
        return cands[int(rng.integers(len(cands)))]
    best = cands[0]
    best_w = _ridge_weight(t, cands[0][1])
    for cand in cands[1:]:
        w = _ridge_weight(t, cand[1])
        if w > best_w:
            best, best_w = cand, w
    return best


def reconstruct_all(
    t: Tessellation,
    patch: PatchSolution,
    frontier: FrontierPolicy = FrontierPolicy.first(),
    merge: MergePolicy = MergePolicy.first(),
) -> tuple[dict[CellId, Point2], PropagationTrace]:
    """Recover every generator from the solved patch.

    Returns the full cell -> generator map and the trace of the sweep.
    Raises UnreachableCellsError if the ridge adjacency graph does not
    connect every cell to the patch.
    """
    known: dict[CellId, Point2] = dict(patch.generators)
    depth: dict[CellId, int] = {c: 0 for c in known}
    order: list[tuple[CellId, CellId, RidgeId]] = []
    candidates: dict[CellId, int] = {}
    reflect_calls = 0
    rng = np.random.default_rng(frontier.seed) if frontier.kind == "random" else None

    current = sorted(known)
    d = 0
    while current:
        incoming: dict[CellId, list[tuple[CellId, RidgeId]]] = {}
        for c in current:
            for nc, rid in neighbors(t, c):
                if nc in depth:
                    continue
                incoming.setdefault(nc, []).append((c, rid))
        if not incoming:
            break
        nxt = sorted(incoming)
        for nc in nxt:
            cands = incoming[nc]
            candidates[nc] = len(cands)
            if merge.kind == "weighted" and len(cands) > 1:
                pts = []
                wts = []
                for src, rid in cands:
                    pts.append(reflect_into(t, rid, known[src]))
                    wts.append(_ridge_weight(t, rid))
                    reflect_calls += 1
                wsum = sum(wts)
                if wsum <= 0.0:
                    wts = [1.0] * len(pts)
                    wsum = float(len(pts))
                px = sum(w * p.x for w, p in zip(wts, pts)) / wsum
                py = sum(w * p.y for w, p in zip(wts, pts)) / wsum
                known[nc] = Point2(px, py)
                src, rid = cands[0]
            else:
                src, rid = _choose(cands, frontier, rng, t)
                known[nc] = reflect_into(t, rid, known[src])
                reflect_calls += 1
            depth[nc] = d + 1
            order.append((nc, src, rid))
        current = nxt
        d += 1

    missing = tuple(c for c in range(len(t.cells)) if c not in known)
    if missing:
        raise UnreachableCellsError(
            f"{len(missing)} of {len(t.cells)} cells cannot be reached from the"
            f" patch around cell {patch.members[0]}",
            cells=missing,
        )
    trace = PropagationTrace(
        order=tuple(order),
        depth=depth,
        candidates=candidates,
        reflect_calls=reflect_calls,
    )
    return known, trace
