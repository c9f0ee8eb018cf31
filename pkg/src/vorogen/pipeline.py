"""One-call reconstruction wiring anchor selection, the patch solve and
propagation together, with the two baselines selectable by name."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

from .anchor import AnchorPolicy, select_anchor
from .baselines import DEFAULT_PERTURB_EPS, brute_force_all, c_prime_all
from .geom import Point2
from .propagate import FrontierPolicy, MergePolicy, reconstruct_all
from .solver import assemble_patch, solve_patch
from .tessellation import CellId, GroundTruth, Tessellation

METHODS = ("anchor", "brute", "cprime")


@dataclass(frozen=True)
class Policies:
    """All tunable choices of the anchor method, bundled for plumbing."""

    anchor: AnchorPolicy = field(default_factory=AnchorPolicy.best_score)
    frontier: FrontierPolicy = field(default_factory=FrontierPolicy.first)
    merge: MergePolicy = field(default_factory=MergePolicy.first)


@dataclass(frozen=True)
class ReconstructionReport:
    """Recovered generators (indexed by cell id) plus solve diagnostics.

    ``rmse``/``max_rse`` are present only when ground truth was supplied.
    Times are wall-clock seconds and are the only non-deterministic fields.
    """

    method: str
    generators: tuple[Point2, ...]
    anchor: Optional[CellId] = None
    depth: int = 0
    residual: Optional[float] = None
    condition: Optional[float] = None
    rmse: Optional[float] = None
    max_rse: Optional[float] = None
    assemble_solve_time: float = 0.0
    propagate_time: float = 0.0


def _errors(
    generators: tuple[Point2, ...], gt: GroundTruth
) -> tuple[float, float]:
    sq = 0.0
    worst = 0.0
    for g, true in zip(generators, gt.generators):
        e = math.hypot(g.x - true[0], g.y - true[1])
        sq += e * e
        worst = max(worst, e)
    return math.sqrt(sq / len(generators)), worst


def reconstruct(
    t: Tessellation,
    method: str = "anchor",
    policies: Policies = Policies(),
    gt: Optional[GroundTruth] = None,
    perturb_eps: float = DEFAULT_PERTURB_EPS,
) -> ReconstructionReport:
    """Recover every generator of ``t`` with the chosen method.

    ``anchor`` solves one patch and propagates by reflection; ``brute``
    solves every eligible cell independently; ``cprime`` is the
    angle-rotation construction. Error statistics are filled in when ``gt``
    is given.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    anchor_cell: Optional[CellId] = None
    depth = 0
    residual: Optional[float] = None
    condition: Optional[float] = None
    propagate_time = 0.0
    t0 = time.perf_counter()
    if method == "anchor":
        anchor_cell = select_anchor(t, policies.anchor)
        patch = solve_patch(assemble_patch(t, anchor_cell))
        t1 = time.perf_counter()
        known, trace = reconstruct_all(t, patch, policies.frontier, policies.merge)
        propagate_time = time.perf_counter() - t1
        generators = tuple(known[c] for c in range(len(t.cells)))
        depth = trace.max_depth
        residual = patch.residual
        condition = patch.condition
        solve_time = t1 - t0
    elif method == "brute":
        triples = brute_force_all(t)
        generators = tuple(p for _, p, _ in triples)
        residual = max(r for _, _, r in triples)
        solve_time = time.perf_counter() - t0
    else:
        pairs = c_prime_all(t, perturb_eps)
        generators = tuple(p for _, p in pairs)
        solve_time = time.perf_counter() - t0
    rmse = max_rse = None
    if gt is not None:
        if len(gt.generators) != len(generators):
            raise ValueError("ground truth length does not match cell count")
        rmse, max_rse = _errors(generators, gt)
    return ReconstructionReport(
        method=method,
        generators=generators,
        anchor=anchor_cell,
        depth=depth,
        residual=residual,
        condition=condition,
        rmse=rmse,
        max_rse=max_rse,
        assemble_solve_time=solve_time,
        propagate_time=propagate_time,
    )
