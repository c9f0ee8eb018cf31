"""Tessellation data model, validation, traversal and (de)serialization.

A tessellation is the reconstruction input: vertices, ridges (finite
segments or rays), and cells holding counter-clockwise ridge lists. The
cell adjacency graph is implied by the ridges. Instances are immutable
after construction and safe to share across worker processes.

The file format is JSON with numbers written to 17 significant digits, so
save/load round-trips are bit exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from . import geom
from .errors import ParseError, UnsupportedVersionError
from .geom import Point2, RidgeLine, UnitVec2

CellId = int
RidgeId = int
VertexId = int

FORMAT_VERSION = 1


@dataclass(frozen=True)
class Ridge:
    """Boundary between two cells: a finite segment ``(v0, v1)`` or a ray from ``v0``."""

    cells: tuple[CellId, CellId]
    v0: VertexId
    v1: Optional[VertexId] = None
    ray_dir: Optional[UnitVec2] = None

    @property
    def is_finite(self) -> bool:
        return self.v1 is not None

    def other_cell(self, c: CellId) -> CellId:
        a, b = self.cells
        return b if c == a else a

    def vertex_ids(self) -> tuple[VertexId, ...]:
        return (self.v0,) if self.v1 is None else (self.v0, self.v1)


@dataclass(frozen=True)
class Cell:
    """Ridge ids in counter-clockwise boundary order; rays first and last if unbounded."""

    ridges: tuple[RidgeId, ...]
    bounded: bool


@dataclass(frozen=True)
class GroundTruth:
    """Generator points indexed by CellId (known only on the forward path)."""

    generators: tuple[Point2, ...]


class Tessellation:
    """Immutable vertices/ridges/cells bundle with derived lookup tables."""

    def __init__(self, vertices: Sequence, ridges: Sequence[Ridge], cells: Sequence[Cell]):
        self.vertices: tuple[Point2, ...] = tuple(Point2(float(p[0]), float(p[1])) for p in vertices)
        self.ridges: tuple[Ridge, ...] = tuple(ridges)
        self.cells: tuple[Cell, ...] = tuple(cells)
        pair: dict[tuple[int, int], int] = {}
        incident: dict[int, list[int]] = {}
        for rid, r in enumerate(self.ridges):
            a, b = r.cells
            pair.setdefault((a, b) if a <= b else (b, a), rid)
            for v in r.vertex_ids():
                incident.setdefault(v, []).append(rid)
        self._pair_to_ridge = pair
        self._vertex_ridges = incident
        if self.vertices:
            xs = [p.x for p in self.vertices]
            ys = [p.y for p in self.vertices]
            self._bbox = (min(xs), min(ys), max(xs), max(ys))
        else:
            self._bbox = (0.0, 0.0, 0.0, 0.0)

    # -- derived geometry ---------------------------------------------------

    def bbox(self) -> tuple[float, float, float, float]:
        return self._bbox

    def diameter(self) -> float:
        x0, y0, x1, y1 = self._bbox
        return math.hypot(x1 - x0, y1 - y0) or 1.0

    def degeneracy_threshold(self) -> float:
        """Ridges shorter than this fraction of the diagram diameter are degenerate."""
        return geom.DEGENERACY_REL * self.diameter()

    def ridge_line(self, rid: RidgeId) -> RidgeLine:
        r = self.ridges[rid]
        if r.is_finite:
            return geom.line_from_two_points(
                self.vertices[r.v0], self.vertices[r.v1], min_length=self.degeneracy_threshold()
            )
        return RidgeLine(self.vertices[r.v0], r.ray_dir)

    def ridge_length(self, rid: RidgeId) -> float:
        r = self.ridges[rid]
        if not r.is_finite:
            return math.inf
        a = self.vertices[r.v0]
        b = self.vertices[r.v1]
        return math.hypot(b.x - a.x, b.y - a.y)

    def ridge_point(self, rid: RidgeId) -> Point2:
        """A point on the ridge line: segment midpoint or ray origin."""
        r = self.ridges[rid]
        if r.is_finite:
            a = self.vertices[r.v0]
            b = self.vertices[r.v1]
            return Point2(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
        return self.vertices[r.v0]

    def ridge_between(self, a: CellId, b: CellId) -> Optional[RidgeId]:
        return self._pair_to_ridge.get((a, b) if a <= b else (b, a))

    def vertex_ridges(self, v: VertexId) -> tuple[RidgeId, ...]:
        return tuple(self._vertex_ridges.get(v, ()))


def neighbors(t: Tessellation, c: CellId) -> list[tuple[CellId, RidgeId]]:
    """Adjacent cells of ``c`` with the shared ridge, in the cell's CCW ridge order."""
    return [(t.ridges[rid].other_cell(c), rid) for rid in t.cells[c].ridges]


def ring_pairs(t: Tessellation, anchor: CellId) -> list[tuple[CellId, CellId, RidgeLine]]:
    """Consecutive-neighbor pairs around a bounded anchor that share a ridge.

    Pairs whose two cells only touch at a vertex (valence > 3) are omitted,
    so the result can be shorter than the anchor's degree.
    """
    cell = t.cells[anchor]
    if not cell.bounded:
        raise ValueError(f"anchor cell {anchor} is not bounded")
    nb = neighbors(t, anchor)
    k = len(nb)
    out = []
    for i in range(k):
        bx = nb[i][0]
        by = nb[(i + 1) % k][0]
        rid = t.ridge_between(bx, by)
        if rid is not None:
            out.append((bx, by, t.ridge_line(rid)))
    return out


# -- validation ---------------------------------------------------------------


def validate(t: Tessellation) -> list[str]:
    """Check structural invariants; returns one message per violation.

    An empty list means the tessellation is internally consistent and in
    generic position (every vertex on exactly 3 ridges).
    """
    out: list[str] = []
    nv, nr, nc = len(t.vertices), len(t.ridges), len(t.cells)
    for i, p in enumerate(t.vertices):
        if not (math.isfinite(p.x) and math.isfinite(p.y)):
            out.append(f"vertex {i} has non-finite coordinates")
    thresh = t.degeneracy_threshold()
    referenced: set[int] = set()
    for rid, r in enumerate(t.ridges):
        a, b = r.cells
        if a == b:
            out.append(f"ridge {rid} joins cell {a} to itself")
        if not (0 <= a < nc and 0 <= b < nc):
            out.append(f"ridge {rid} references an out-of-range cell")
            continue
        if not (0 <= r.v0 < nv) or (r.v1 is not None and not (0 <= r.v1 < nv)):
            out.append(f"ridge {rid} references an out-of-range vertex")
            continue
        referenced.update(r.vertex_ids())
        if r.is_finite:
            if r.v0 == r.v1 or t.ridge_length(rid) <= thresh:
                out.append(f"degenerate ridge {rid} (length below {thresh:.3e})")
        else:
            if r.ray_dir is None or not geom.is_unit(r.ray_dir, tol=1e-9):
                out.append(f"ridge {rid} ray direction is not unit length")
        for c in r.cells:
            if t.cells[c].ridges.count(rid) != 1:
                out.append(f"asymmetric adjacency at ridge {rid} (cell {c})")
    for v in range(nv):
        if v not in referenced:
            out.append(f"orphan vertex {v}")
        elif len(t._vertex_ridges.get(v, ())) != 3 and not _is_split_bisector(t, v):
            out.append(
                f"vertex {v} is shared by {len(t._vertex_ridges.get(v, ()))} ridges (expected 3)"
            )
    for cid, cell in enumerate(t.cells):
        out.extend(_validate_cell(t, cid, cell))
    return out


def _is_split_bisector(t: Tessellation, v: VertexId) -> bool:
    """Two opposite rays from one vertex between the same two cells.

    This is how a bisector with no Voronoi vertex on it (the 2-site diagram)
    is represented, so it is tolerated at valence 2.
    """
    rids = t._vertex_ridges.get(v, ())
    if len(rids) != 2:
        return False
    r1, r2 = (t.ridges[r] for r in rids)
    if r1.is_finite or r2.is_finite or r1.v0 != v or r2.v0 != v:
        return False
    if tuple(sorted(r1.cells)) != tuple(sorted(r2.cells)):
        return False
    return math.hypot(r1.ray_dir[0] + r2.ray_dir[0], r1.ray_dir[1] + r2.ray_dir[1]) <= 1e-9


def _ridge_vertex_set(r: Ridge) -> set[int]:
    return set(r.vertex_ids())


def _validate_cell(t: Tessellation, cid: int, cell: Cell) -> list[str]:
    msgs: list[str] = []
    if not cell.ridges:
        return [f"cell {cid} has no ridges"]
    for rid in cell.ridges:
        if not (0 <= rid < len(t.ridges)):
            return [f"cell {cid} references out-of-range ridge {rid}"]
        if cid not in t.ridges[rid].cells:
            msgs.append(f"cell {cid} lists ridge {rid} that does not border it")
    if msgs:
        return msgs
    rays = [rid for rid in cell.ridges if not t.ridges[rid].is_finite]
    if cell.bounded:
        if rays:
            msgs.append(f"bounded cell {cid} contains ray ridge {rays[0]}")
        else:
            msgs.extend(_validate_polygon(t, cid, cell))
    else:
        if _is_parallel_strip(t, cell):
            return msgs  # fully split-bisector boundary has no chain to walk
        if len(rays) != 2:
            msgs.append(f"unbounded cell {cid} has {len(rays)} ray ridges (expected 2)")
        elif not (cell.ridges[0] in rays and cell.ridges[-1] in rays):
            msgs.append(f"unbounded cell {cid} does not start and end with its rays")
        for i in range(len(cell.ridges) - 1):
            r1 = t.ridges[cell.ridges[i]]
            r2 = t.ridges[cell.ridges[i + 1]]
            if len(_ridge_vertex_set(r1) & _ridge_vertex_set(r2)) != 1:
                msgs.append(
                    f"cell {cid} boundary chain breaks between ridges"
                    f" {cell.ridges[i]} and {cell.ridges[i + 1]}"
                )
    return msgs


def _is_parallel_strip(t: Tessellation, cell: Cell) -> bool:
    """Cell bounded only by whole bisector lines (collinear-site diagrams).

    Such a cell is a half plane or a strip: every ridge is a ray, and the
    rays pair up into split bisectors through at most two vertices.
    """
    if any(t.ridges[rid].is_finite for rid in cell.ridges):
        return False
    verts = {t.ridges[rid].v0 for rid in cell.ridges}
    if len(verts) * 2 != len(cell.ridges) or len(verts) > 2:
        return False
    return all(_is_split_bisector(t, v) for v in verts)


def _polygon_vertices(t: Tessellation, cell: Cell) -> Optional[list[int]]:
    """Vertex ids of a bounded cell's polygon; None when the chain is broken.

    Entry ``i`` is the vertex shared by ridge ``i`` and ridge ``i+1`` (cyclic).
    """
    rids = cell.ridges
    m = len(rids)
    shared = []
    for i in range(m):
        s = _ridge_vertex_set(t.ridges[rids[i]]) & _ridge_vertex_set(t.ridges[rids[(i + 1) % m]])
        if len(s) != 1:
            return None
        shared.append(s.pop())
    return shared


def _validate_polygon(t: Tessellation, cid: int, cell: Cell) -> list[str]:
    if len(cell.ridges) < 3:
        return [f"bounded cell {cid} has only {len(cell.ridges)} ridges"]
    verts = _polygon_vertices(t, cell)
    if verts is None:
        return [f"cell {cid} ridges do not chain into a closed polygon"]
    if len(set(verts)) != len(verts):
        return [f"cell {cid} polygon revisits a vertex"]
    pts = [t.vertices[v] for v in verts]
    m = len(pts)
    area2 = 0.0
    for i in range(m):
        a = pts[i]
        b = pts[(i + 1) % m]
        c = pts[(i + 2) % m]
        e1x, e1y = b.x - a.x, b.y - a.y
        e2x, e2y = c.x - b.x, c.y - b.y
        cross = e1x * e2y - e1y * e2x
        norm = math.hypot(e1x, e1y) * math.hypot(e2x, e2y)
        if norm > 0.0 and cross < -1e-9 * norm:
            return [f"cell {cid} polygon is not convex at vertex {verts[(i + 1) % m]}"]
        area2 += a.x * b.y - b.x * a.y
    if area2 <= 0.0:
        return [f"cell {cid} polygon is not counter-clockwise"]
    return []


# -- serialization ------------------------------------------------------------


def _num(x: float) -> str:
    return format(float(x), ".17g")


def dumps(t: Tessellation, gt: Optional[GroundTruth] = None) -> str:
    """Deterministic textual form of a tessellation (17 significant digits)."""

    def pt(p) -> str:
        return f"[{_num(p[0])}, {_num(p[1])}]"

    rparts = []
    for r in t.ridges:
        if r.is_finite:
            rparts.append(f'{{"cells": [{r.cells[0]}, {r.cells[1]}], "finite": [{r.v0}, {r.v1}]}}')
        else:
            rparts.append(
                f'{{"cells": [{r.cells[0]}, {r.cells[1]}],'
                f' "ray": {{"v": {r.v0}, "dir": {pt(r.ray_dir)}}}}}'
            )
    cparts = []
    for c in t.cells:
        rid_list = ", ".join(str(rid) for rid in c.ridges)
        cparts.append(f'{{"ridges": [{rid_list}], "bounded": {"true" if c.bounded else "false"}}}')
    lines = ["{"]
    lines.append(f'  "version": {FORMAT_VERSION},')
    lines.append('  "vertices": [' + ", ".join(pt(p) for p in t.vertices) + "],")
    lines.append('  "ridges": [' + ", ".join(rparts) + "],")
    tail = '  "cells": [' + ", ".join(cparts) + "]"
    if gt is not None:
        lines.append(tail + ",")
        lines.append('  "generators": [' + ", ".join(pt(g) for g in gt.generators) + "]")
    else:
        lines.append(tail)
    lines.append("}")
    return "\n".join(lines) + "\n"


def save(t: Tessellation, path, gt: Optional[GroundTruth] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(t, gt))


def _parse_point(obj, where: str) -> tuple[float, float]:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj)
    ):
        raise ParseError(f"{where}: expected a [x, y] number pair, got {obj!r}")
    x, y = float(obj[0]), float(obj[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ParseError(f"{where}: coordinates must be finite")
    return x, y


def _parse_cell_pair(obj, where: str) -> tuple[int, int]:
    if (
        not isinstance(obj, list)
        or len(obj) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in obj)
    ):
        raise ParseError(f"{where}: expected a [cell, cell] integer pair, got {obj!r}")
    return obj[0], obj[1]


def loads(text: str) -> tuple[Tessellation, Optional[GroundTruth]]:
    """Parse the textual format; raises ParseError / UnsupportedVersionError."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"unsupported format version {version!r} (expected {FORMAT_VERSION})"
        )
    for field in ("vertices", "ridges", "cells"):
        if field not in doc:
            raise ParseError(f"missing required field '{field}'")
        if not isinstance(doc[field], list):
            raise ParseError(f"field '{field}' must be an array")
    vertices = [_parse_point(v, f"vertices[{i}]") for i, v in enumerate(doc["vertices"])]
    ridges = []
    for i, robj in enumerate(doc["ridges"]):
        where = f"ridges[{i}]"
        if not isinstance(robj, dict):
            raise ParseError(f"{where}: expected an object")
        cells = _parse_cell_pair(robj.get("cells"), f"{where}.cells")
        has_finite = "finite" in robj
        has_ray = "ray" in robj
        if has_finite == has_ray:
            raise ParseError(f"{where}: exactly one of 'finite' or 'ray' is required")
        if has_finite:
            fin = robj["finite"]
            if (
                not isinstance(fin, list)
                or len(fin) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in fin)
            ):
                raise ParseError(f"{where}.finite: expected a [v0, v1] integer pair")
            ridges.append(Ridge(cells=cells, v0=fin[0], v1=fin[1]))
        else:
            ray = robj["ray"]
            if not isinstance(ray, dict) or "v" not in ray or "dir" not in ray:
                raise ParseError(f"{where}.ray: expected an object with 'v' and 'dir'")
            if not isinstance(ray["v"], int) or isinstance(ray["v"], bool):
                raise ParseError(f"{where}.ray.v: expected an integer vertex id")
            dx, dy = _parse_point(ray["dir"], f"{where}.ray.dir")
            d = UnitVec2(dx, dy)
            if not geom.is_unit(d, tol=1e-9):
                raise ParseError(f"{where}.ray.dir: direction must be unit length")
            ridges.append(Ridge(cells=cells, v0=ray["v"], ray_dir=d))
    cells = []
    for i, cobj in enumerate(doc["cells"]):
        where = f"cells[{i}]"
        if not isinstance(cobj, dict):
            raise ParseError(f"{where}: expected an object")
        rid_list = cobj.get("ridges")
        if not isinstance(rid_list, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in rid_list
        ):
            raise ParseError(f"{where}.ridges: expected an array of ridge ids")
        bounded = cobj.get("bounded")
        if not isinstance(bounded, bool):
            raise ParseError(f"{where}.bounded: expected a boolean")
        cells.append(Cell(ridges=tuple(rid_list), bounded=bounded))
    t = Tessellation(vertices, ridges, cells)
    gt = None
    if "generators" in doc:
        gens = doc["generators"]
        if not isinstance(gens, list):
            raise ParseError("field 'generators' must be an array")
        if len(gens) != len(cells):
            raise ParseError(
                f"field 'generators' has {len(gens)} entries for {len(cells)} cells"
            )
        pts = [_parse_point(g, f"generators[{i}]") for i, g in enumerate(gens)]
        gt = GroundTruth(tuple(Point2(x, y) for x, y in pts))
    return t, gt


def load(path) -> tuple[Tessellation, Optional[GroundTruth]]:
    """Read a tessellation file; OSError propagates for missing/unreadable paths."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return loads(text)
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from e
