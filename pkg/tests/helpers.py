"""Shared test utilities: independent oracles and fixture transforms.

The half-plane clipper here is a from-scratch O(n^2) Voronoi cell
construction used to cross-check the Delaunay-based builder, and the
normal-equations solve is an independent oracle for the QR path.
"""

from __future__ import annotations

import math

import numpy as np

from vorogen.geom import Point2, Reflector2, UnitVec2, reflector_from_dir, unit_vec
from vorogen.solver import PatchSystem
from vorogen.tessellation import Cell, GroundTruth, Ridge, Tessellation


def halfplane_cell(sites, i: int, pad: float) -> list[tuple[float, float]]:
    """Voronoi cell of site ``i`` clipped to a large frame, CCW.

    Clips the frame polygon successively against the half-plane closer to
    site i than to site j, for every other j (Sutherland-Hodgman). For a
    bounded cell the frame never participates as long as ``pad`` exceeds
    the cell radius.
    """
    xs = [p[0] for p in sites]
    ys = [p[1] for p in sites]
    lo_x, hi_x = min(xs) - pad, max(xs) + pad
    lo_y, hi_y = min(ys) - pad, max(ys) + pad
    poly = [(lo_x, lo_y), (hi_x, lo_y), (hi_x, hi_y), (lo_x, hi_y)]
    px, py = sites[i]
    for j, (qx, qy) in enumerate(sites):
        if j == i:
            continue
        # inside(p) <=> |p - site_i|^2 <= |p - site_j|^2 <=> a.x + b.y <= c
        a = 2.0 * (qx - px)
        b = 2.0 * (qy - py)
        c = qx * qx + qy * qy - px * px - py * py
        clipped: list[tuple[float, float]] = []
        m = len(poly)
        for k in range(m):
            x0, y0 = poly[k]
            x1, y1 = poly[(k + 1) % m]
            in0 = a * x0 + b * y0 <= c
            in1 = a * x1 + b * y1 <= c
            if in0:
                clipped.append((x0, y0))
            if in0 != in1:
                t = (c - a * x0 - b * y0) / (a * (x1 - x0) + b * (y1 - y0))
                clipped.append((x0 + t * (x1 - x0), y0 + t * (y1 - y0)))
        poly = clipped
        if not poly:
            break
    return poly


def polygon_vertices(t: Tessellation, c: int) -> list[Point2]:
    """Boundary polygon of a bounded cell, read off the ridge chain."""
    rids = t.cells[c].ridges
    m = len(rids)
    out = []
    for k in range(m):
        s = set(t.ridges[rids[k]].vertex_ids()) & set(t.ridges[rids[(k + 1) % m]].vertex_ids())
        assert len(s) == 1, f"cell {c} ridges {rids[k]},{rids[(k + 1) % m]} share {len(s)} vertices"
        out.append(t.vertices[s.pop()])
    return out


def cyclic_match(poly_a, poly_b, tol: float) -> bool:
    """True when the two polygons are equal up to rotation of the vertex list."""
    if len(poly_a) != len(poly_b):
        return False
    m = len(poly_a)
    for shift in range(m):
        if all(
            math.hypot(poly_a[k][0] - poly_b[(k + shift) % m][0],
                       poly_a[k][1] - poly_b[(k + shift) % m][1]) <= tol
            for k in range(m)
        ):
            return True
    return False


def point_in_polygon(p, poly) -> bool:
    """Strict interior test for a convex CCW polygon."""
    m = len(poly)
    for k in range(m):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % m]
        if (x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0) <= 0.0:
            return False
    return True


def normal_equations_solve(system: PatchSystem) -> np.ndarray:
    """Independent least-squares oracle: solve M^T M z = M^T b directly."""
    m = system.matrix
    return np.linalg.solve(m.T @ m, m.T @ system.rhs)


def mirror_system(members, equations) -> PatchSystem:
    """Hand-build a PatchSystem from (src, dst, line_dir, point_on_line) tuples.

    Writes the public contract rows g_dst - R g_src = (I - R) c without going
    through assemble_patch, so degenerate systems can be constructed at will.
    """
    index = {cell: j for j, cell in enumerate(members)}
    mat = np.zeros((2 * len(equations), 2 * len(members)))
    rhs = np.zeros(2 * len(equations))
    pairs = []
    for row, (src, dst, direction, c) in enumerate(equations):
        r: Reflector2 = reflector_from_dir(unit_vec(*direction))
        s, d = index[src], index[dst]
        mat[2 * row, 2 * d] = 1.0
        mat[2 * row + 1, 2 * d + 1] = 1.0
        mat[2 * row, 2 * s] -= r.m00
        mat[2 * row, 2 * s + 1] -= r.m01
        mat[2 * row + 1, 2 * s] -= r.m10
        mat[2 * row + 1, 2 * s + 1] -= r.m11
        rhs[2 * row] = c[0] - (r.m00 * c[0] + r.m01 * c[1])
        rhs[2 * row + 1] = c[1] - (r.m10 * c[0] + r.m11 * c[1])
        pairs.append((src, dst))
    return PatchSystem(
        anchor=members[0], members=tuple(members), matrix=mat, rhs=rhs, row_pairs=tuple(pairs)
    )


def transform_tessellation(t: Tessellation, point_map, dir_map) -> Tessellation:
    """Apply an isometry: ``point_map`` to vertices, ``dir_map`` to ray directions."""
    vertices = [point_map(p) for p in t.vertices]
    ridges = []
    for r in t.ridges:
        if r.is_finite:
            ridges.append(r)
        else:
            dx, dy = dir_map(r.ray_dir)
            ridges.append(Ridge(cells=r.cells, v0=r.v0, ray_dir=unit_vec(dx, dy)))
    return Tessellation(vertices, ridges, list(t.cells))


def relabel_cells(t: Tessellation, perm, gt: GroundTruth | None = None):
    """Rename cell ids via ``perm`` (old id -> new id); geometry untouched."""
    ridges = [
        Ridge(cells=(perm[r.cells[0]], perm[r.cells[1]]), v0=r.v0, v1=r.v1, ray_dir=r.ray_dir)
        for r in t.ridges
    ]
    cells: list[Cell | None] = [None] * len(t.cells)
    for old, cell in enumerate(t.cells):
        cells[perm[old]] = cell
    out = Tessellation(list(t.vertices), ridges, cells)
    if gt is None:
        return out
    gens: list[Point2 | None] = [None] * len(gt.generators)
    for old, g in enumerate(gt.generators):
        gens[perm[old]] = g
    return out, GroundTruth(tuple(gens))


def max_cell_error(generators: dict, gt: GroundTruth) -> float:
    return max(
        math.hypot(p.x - gt.generators[c][0], p.y - gt.generators[c][1])
        for c, p in generators.items()
    )


def rmse(generators: dict, gt: GroundTruth) -> float:
    total = sum(
        (p.x - gt.generators[c][0]) ** 2 + (p.y - gt.generators[c][1]) ** 2
        for c, p in generators.items()
    )
    return math.sqrt(total / len(generators))
