"""Reference reconstructions used for benchmarking.

Two methods live here. The per-cell brute force repeats the full patch
solve with every eligible cell as its own anchor, keeping only that cell's
generator from each solve. The angle-rotation method recovers a generator
from cell geometry alone: at each vertex the extension of the outer ridge
into the cell, reflected across the bisector of the cell's wedge at that
vertex, is a ray through the generator; pairwise ray intersections are
averaged with sensitivity weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import geom
from .anchor import eligible_cells
from .errors import (
    DegenerateRidgeError,
    NoEligibleAnchorError,
    NoIntersectionError,
    UnderdeterminedError,
    UnreachableCellsError,
)
from .geom import Point2, RidgeLine, UnitVec2
from .solver import assemble_patch, solve_patch
from .tessellation import CellId, Tessellation, neighbors

DEFAULT_PERTURB_EPS = 1e-7
# a zero-displacement (insensitive) pair gets at most this multiple of the
# mean inverse-displacement weight
ZERO_DELTA_WEIGHT_CAP = 10.0


@dataclass(frozen=True)
class CPrimeEstimate:
    """One cell's angle-rotation estimate with its audit trail.

    ``weights`` are nonnegative and sum to 1; ``estimate`` is the weighted
    mean of ``raw_intersections``.
    """

    cell: CellId
    ray_pairs_used: int
    raw_intersections: list[Point2]
    weights: list[float]
    estimate: Point2


def _fill_by_reflection(
    t: Tessellation, known: dict[CellId, Point2]
) -> list[tuple[CellId, CellId]]:
    """Resolve every remaining cell by reflecting its nearest solved neighbor.

    Layered sweep from the solved set; each new cell takes one reflection
    through the first available ridge (lowest source cell id). Returns the
    (cell, source) fill order; mutates ``known``.
    """
    filled: list[tuple[CellId, CellId]] = []
    current = sorted(known)
    while current:
        incoming: dict[CellId, tuple[CellId, int]] = {}
        for c in current:
            for nc, rid in neighbors(t, c):
                if nc in known or nc in incoming:
                    continue
                incoming[nc] = (c, rid)
        if not incoming:
            break
        nxt = sorted(incoming)
        for nc in nxt:
            src, rid = incoming[nc]
            known[nc] = geom.reflect_point(known[src], t.ridge_line(rid))
            filled.append((nc, src))
        current = nxt
    missing = tuple(c for c in range(len(t.cells)) if c not in known)
    if missing:
        raise UnreachableCellsError(
            f"{len(missing)} cells cannot be reached from any solved cell", cells=missing
        )
    return filled


def brute_force_all(t: Tessellation) -> list[tuple[CellId, Point2, float]]:
    """Per-cell independent reconstruction: one full patch solve per cell.

    Every eligible cell anchors its own solve and contributes only its own
    generator. Ineligible (hull) cells are then filled by reflection from
    the nearest solved cell so the result covers all cells; filled cells
    inherit the residual of their source. Returns (cell, point, residual)
    triples for every cell, in cell order.
    """
    known: dict[CellId, Point2] = {}
    resid: dict[CellId, float] = {}
    for c in eligible_cells(t):
        sol = solve_patch(assemble_patch(t, c))
        known[c] = sol.generators[c]
        resid[c] = sol.residual
    if not known:
        raise NoEligibleAnchorError(
            "no anchor-eligible cell; the per-cell brute force cannot start"
        )
    for nc, src in _fill_by_reflection(t, known):
        resid[nc] = resid[src]
    return [(c, known[c], resid[c]) for c in range(len(t.cells))]


def _rotate(d, angle: float) -> UnitVec2:
    c = math.cos(angle)
    s = math.sin(angle)
    return geom.unit_vec(d[0] * c - d[1] * s, d[0] * s + d[1] * c)


def _generator_rays(t: Tessellation, c: CellId) -> list[RidgeLine]:
    """One generator-passing ray per usable cell vertex.

    At a vertex A the two cell sides span a wedge (< pi, the cell is convex)
    containing the extension of the outer ridge into the cell. As seen from
    A the sides bisect the angles (generator, neighbor generator) and the
    outer ridge bisects the two neighbors', so the generator direction is
    the outer extension reflected across the wedge bisector.
    """
    cell = t.cells[c]
    cell_rids = set(cell.ridges)
    vids = sorted({v for rid in cell.ridges for v in t.ridges[rid].vertex_ids()})
    rays: list[RidgeLine] = []
    for v in vids:
        incident = t.vertex_ridges(v)
        sides = [rid for rid in incident if rid in cell_rids]
        outers = [rid for rid in incident if rid not in cell_rids]
        if len(sides) != 2 or not outers:
            continue
        a = t.vertices[v]
        side_dirs = []
        ok = True
        for rid in sides:
            r = t.ridges[rid]
            w = t.vertices[r.v1 if r.v0 == v else r.v0]
            try:
                side_dirs.append(geom.unit_vec(w.x - a.x, w.y - a.y))
            except DegenerateRidgeError:
                ok = False
                break
        if not ok:
            continue
        sa, sb = side_dirs
        if sa.x * sb.y - sa.y * sb.x < 0.0:
            sa, sb = sb, sa
        if abs(sa.x * sb.y - sa.y * sb.x) <= geom.PARALLEL_TOL:
            continue
        try:
            bis = geom.unit_vec(sa.x + sb.x, sa.y + sb.y)
        except DegenerateRidgeError:
            continue
        refl = geom.reflector_from_dir(bis)
        for rid in outers:
            try:
                d0 = t.ridge_line(rid).dir
            except DegenerateRidgeError:
                continue
            into = None
            for dz in (d0, UnitVec2(-d0.x, -d0.y)):
                if sa.x * dz.y - sa.y * dz.x > 0.0 and dz.x * sb.y - dz.y * sb.x > 0.0:
                    into = dz
                    break
            if into is None:
                continue
            g = refl.apply(into)
            rays.append(RidgeLine(a, geom.unit_vec(g.x, g.y)))
    return rays


def c_prime_cell(
    t: Tessellation, c: CellId, perturb_eps: float = DEFAULT_PERTURB_EPS
) -> CPrimeEstimate:
    """Angle-rotation estimate of one bounded cell's generator.

    Generator rays from every usable vertex are intersected pairwise; each
    pair is weighted by the inverse of its sensitivity, measured as the mean
    intersection displacement under +-perturb_eps rotations of either ray.
    Insensitive pairs (zero displacement) are capped at 10x the mean weight;
    with perturb_eps = 0 all pairs are insensitive and the weights collapse
    to uniform.
    """
    if not t.cells[c].bounded:
        raise UnderdeterminedError(
            f"cell {c} is unbounded; the angle construction needs a closed polygon"
        )
    rays = _generator_rays(t, c)
    if len(rays) < 2:
        raise UnderdeterminedError(
            f"cell {c} yields {len(rays)} generator rays; need at least 2"
        )
    points: list[Point2] = []
    deltas: list[float] = []
    for i in range(len(rays)):
        for j in range(i + 1, len(rays)):
            try:
                p = geom.intersect_lines(rays[i], rays[j])
            except NoIntersectionError:
                continue
            points.append(p)
            deltas.append(_pair_delta(rays[i], rays[j], p, perturb_eps))
    if not points:
        raise UnderdeterminedError(
            f"cell {c} has no two non-parallel generator rays"
        )
    weights = _delta_weights(deltas)
    ex = sum(w * p.x for w, p in zip(weights, points))
    ey = sum(w * p.y for w, p in zip(weights, points))
    return CPrimeEstimate(
        cell=c,
        ray_pairs_used=len(points),
        raw_intersections=points,
        weights=weights,
        estimate=Point2(ex, ey),
    )


def _pair_delta(r1: RidgeLine, r2: RidgeLine, p: Point2, eps: float) -> float:
    if eps == 0.0:
        return 0.0
    disp = []
    for sign in (eps, -eps):
        for a, b in ((RidgeLine(r1.anchor, _rotate(r1.dir, sign)), r2),
                     (r1, RidgeLine(r2.anchor, _rotate(r2.dir, sign)))):
            try:
                q = geom.intersect_lines(a, b)
                disp.append(math.hypot(q.x - p.x, q.y - p.y))
            except NoIntersectionError:
                disp.append(math.inf)
    return sum(disp) / len(disp)


def _delta_weights(deltas: list[float]) -> list[float]:
    raw: list[float] = []
    capped: list[int] = []
    for i, d in enumerate(deltas):
        if d == 0.0:
            raw.append(0.0)
            capped.append(i)
        elif math.isinf(d):
            raw.append(0.0)
        else:
            raw.append(1.0 / d)
    if capped:
        others = [raw[i] for i in range(len(raw)) if i not in capped]
        cap = ZERO_DELTA_WEIGHT_CAP * (sum(others) / len(others)) if others else 0.0
        for i in capped:
            raw[i] = cap
    total = sum(raw)
    if total <= 0.0:
        return [1.0 / len(raw)] * len(raw)
    return [w / total for w in raw]


def c_prime_all(
    t: Tessellation, perturb_eps: float = DEFAULT_PERTURB_EPS
) -> list[tuple[CellId, Point2]]:
    """Angle-rotation estimates for every cell.

    Bounded cells get their own construction; unbounded ones (and any cell
    where the construction is underdetermined) are filled by reflection
    from the nearest estimated cell, mirroring the brute-force fill.
    """
    known: dict[CellId, Point2] = {}
    for c in range(len(t.cells)):
        if not t.cells[c].bounded:
            continue
        try:
            known[c] = c_prime_cell(t, c, perturb_eps).estimate
        except (UnderdeterminedError, DegenerateRidgeError):
            continue
    if not known:
        raise UnderdeterminedError("no cell admits the angle construction")
    _fill_by_reflection(t, known)
    return [(c, known[c]) for c in range(len(t.cells))]
