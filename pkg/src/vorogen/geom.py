"""Flat 2D primitives: points, directed lines and reflection matrices.

Everything here is an immutable value type plus pure functions, all in
double precision. The reflection matrix across a line with unit direction
``d`` is ``2 d d^T - I``: symmetric, involutive, determinant -1.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from .errors import DegenerateRidgeError, NoIntersectionError

# Two directions count as parallel when the |sin| of their angle falls below
# PARALLEL_TOL. Length degeneracy cutoffs are taken relative to the diagram
# diameter (DEGENERACY_REL) by the callers that know that diameter.
PARALLEL_TOL = 1e-10
DEGENERACY_REL = 1e-12
UNIT_TOL = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


class UnitVec2(NamedTuple):
    x: float
    y: float

    def perp(self) -> "UnitVec2":
        """Counter-clockwise perpendicular."""
        return UnitVec2(-self.y, self.x)


class RidgeLine(NamedTuple):
    """Infinite line through ``anchor`` with unit direction ``dir``."""

    anchor: Point2
    dir: UnitVec2


class Reflector2(NamedTuple):
    """Symmetric orthogonal 2x2 matrix with determinant -1."""

    m00: float
    m01: float
    m10: float
    m11: float

    def apply(self, v) -> Point2:
        return Point2(self.m00 * v[0] + self.m01 * v[1], self.m10 * v[0] + self.m11 * v[1])


def unit_vec(x: float, y: float) -> UnitVec2:
    """Normalize ``(x, y)``; raises DegenerateRidgeError on a zero vector."""
    n = math.hypot(x, y)
    if n <= 0.0 or not math.isfinite(n):
        raise DegenerateRidgeError(f"cannot normalize direction ({x}, {y})")
    return UnitVec2(x / n, y / n)


def is_unit(v, tol: float = UNIT_TOL) -> bool:
    return abs(v[0] * v[0] + v[1] * v[1] - 1.0) <= tol


def reflector_from_dir(d) -> Reflector2:
    """Reflection matrix across any line whose direction is the unit vector ``d``."""
    if not is_unit(d):
        raise ValueError(f"direction ({d[0]}, {d[1]}) is not unit length")
    off = 2.0 * d[0] * d[1]
    return Reflector2(2.0 * d[0] * d[0] - 1.0, off, off, 2.0 * d[1] * d[1] - 1.0)


def reflect_point(p, line: RidgeLine) -> Point2:
    """Mirror image of ``p`` across ``line``; points on the line are fixed."""
    ax, ay = line.anchor
    dx, dy = line.dir
    t = (p[0] - ax) * dx + (p[1] - ay) * dy
    # foot of the perpendicular, then continue the same distance beyond it
    fx = ax + t * dx
    fy = ay + t * dy
    return Point2(2.0 * fx - p[0], 2.0 * fy - p[1])


def line_from_two_points(a, b, min_length: float = 0.0) -> RidgeLine:
    """Line through ``a`` and ``b`` anchored at ``a``.

    Raises DegenerateRidgeError when the two points are closer than
    ``min_length`` (or coincide exactly).
    """
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    n = math.hypot(dx, dy)
    if n <= min_length or n == 0.0:
        raise DegenerateRidgeError(
            f"points ({a[0]}, {a[1]}) and ({b[0]}, {b[1]}) are {n:.3e} apart"
            f" (minimum {min_length:.3e})"
        )
    return RidgeLine(Point2(float(a[0]), float(a[1])), UnitVec2(dx / n, dy / n))


def intersect_lines(l1: RidgeLine, l2: RidgeLine) -> Point2:
    """Unique intersection point; near-parallel lines raise NoIntersectionError."""
    d1 = l1.dir
    d2 = l2.dir
    sine = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(sine) <= PARALLEL_TOL:
        raise NoIntersectionError(
            f"lines are parallel within tolerance (|sin| = {abs(sine):.3e})", sine=sine
        )
    wx = l2.anchor[0] - l1.anchor[0]
    wy = l2.anchor[1] - l1.anchor[1]
    t = (wx * d2[1] - wy * d2[0]) / sine
    return Point2(l1.anchor[0] + t * d1[0], l1.anchor[1] + t * d1[1])


def distance_to_line(p, line: RidgeLine) -> float:
    """Perpendicular distance from ``p`` to ``line``."""
    wx = p[0] - line.anchor[0]
    wy = p[1] - line.anchor[1]
    return abs(wx * line.dir[1] - wy * line.dir[0])


def same_line(l1: RidgeLine, l2: RidgeLine, tol: float = 1e-9) -> bool:
    """True when the two lines coincide (direction up to sign, shared points)."""
    cross = l1.dir[0] * l2.dir[1] - l1.dir[1] * l2.dir[0]
    return abs(cross) <= tol and distance_to_line(l2.anchor, l1) <= tol
