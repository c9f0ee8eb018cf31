"""Assembly and solution of the anchor patch system.

Each ridge of the anchor cell, and each ridge between consecutive anchor
neighbors, contributes one mirror equation

    g_target - R g_source = (I - R) c

where R reflects across the ridge line and c is any point on it (the right
hand side does not depend on which point, since I - R annihilates the line
direction). Stacking the equations over the anchor's ridges and the ring
ridges gives an overdetermined linear system in the anchor generator and
its neighbor generators, solved once by Householder QR.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geom
from .anchor import score_cell
from .errors import AnchorIneligibleError, InconsistentSystemError, SingularSystemError
from .geom import Point2
from .tessellation import CellId, Tessellation, neighbors, ring_pairs

# smallest singular value below this fraction of the largest means rank deficient
RANK_REL_TOL = 1e-8
# least-squares residual above this fraction of ||b|| means the ridges are not
# mirror-consistent, i.e. the input is not an exact Voronoi tessellation
CONSISTENCY_REL_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class PatchSystem:
    """The stacked mirror equations around one anchor cell.

    ``members`` lists the cells owning the unknown generators, anchor first;
    unknown ``j`` occupies columns ``2j`` and ``2j + 1``. ``row_pairs`` records,
    per equation (two matrix rows), the (source, target) cells it relates.
    """

    anchor: CellId
    members: tuple[CellId, ...]
    matrix: np.ndarray
    rhs: np.ndarray
    row_pairs: tuple[tuple[CellId, CellId], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def k(self) -> int:
        return len(self.members) - 1

    def column_block(self, cell: CellId) -> int:
        return self.members.index(cell)


@dataclass(frozen=True)
class PatchSolution:
    """Solved generator positions plus the numerical health of the solve."""

    members: tuple[CellId, ...]
    generators: dict[CellId, Point2]
    residual: float
    rank: int
    smin: float
    smax: float

    @property
    def condition(self) -> float:
        return self.smax / self.smin if self.smin > 0.0 else float("inf")


def _mirror_equation(
    mat: np.ndarray, rhs: np.ndarray, row: int, src: int, dst: int, r: geom.Reflector2, c
) -> None:
    # g_dst - R g_src = (I - R) c, written into rows `row` and `row + 1`
    mat[row, 2 * dst] = 1.0
    mat[row + 1, 2 * dst + 1] = 1.0
    mat[row, 2 * src] -= r.m00
    mat[row, 2 * src + 1] -= r.m01
    mat[row + 1, 2 * src] -= r.m10
    mat[row + 1, 2 * src + 1] -= r.m11
    rhs[row] = c[0] - (r.m00 * c[0] + r.m01 * c[1])
    rhs[row + 1] = c[1] - (r.m10 * c[0] + r.m11 * c[1])


def assemble_patch(t: Tessellation, anchor: CellId) -> PatchSystem:
    """Build the patch system for ``anchor``; the anchor must be eligible."""
    score = score_cell(t, anchor)
    if not score.eligible:
        raise AnchorIneligibleError(
            f"cell {anchor} is not anchor-eligible (bounded={t.cells[anchor].bounded},"
            f" degree={score.degree},"
            f" max parallelism={score.max_pairwise_parallelism:.3g})"
        )
    nb = neighbors(t, anchor)
    members: list[CellId] = [anchor]
    block: dict[CellId, int] = {anchor: 0}
    for cid, _ in nb:
        if cid not in block:
            block[cid] = len(members)
            members.append(cid)
    ring = ring_pairs(t, anchor)
    n_eq = len(nb) + len(ring)
    mat = np.zeros((2 * n_eq, 2 * len(members)))
    rhs = np.zeros(2 * n_eq)
    row_pairs: list[tuple[CellId, CellId]] = []
    row = 0
    for cid, rid in nb:
        line = t.ridge_line(rid)
        _mirror_equation(
            mat, rhs, row, block[anchor], block[cid],
            geom.reflector_from_dir(line.dir), t.ridge_point(rid),
        )
        row_pairs.append((anchor, cid))
        row += 2
    for bx, by, line in ring:
        rid = t.ridge_between(bx, by)
        _mirror_equation(
            mat, rhs, row, block[bx], block[by],
            geom.reflector_from_dir(line.dir), t.ridge_point(rid),
        )
        row_pairs.append((bx, by))
        row += 2
    return PatchSystem(
        anchor=anchor,
        members=tuple(members),
        matrix=mat,
        rhs=rhs,
        row_pairs=tuple(row_pairs),
    )


def solve_patch(system: PatchSystem, check_consistency: bool = True) -> PatchSolution:
    """Least-squares solve of the patch system via QR.

    Raises SingularSystemError when the system is rank deficient (for example
    when every ridge in the patch is parallel, which leaves a translation
    along the common direction free). Raises InconsistentSystemError when the
    residual is too large relative to ||b||, which cannot happen for ridges
    that really are perpendicular bisectors of some generator set.
    """
    mat = system.matrix
    rhs = system.rhs
    n = mat.shape[1]
    if mat.shape[0] < n:
        raise SingularSystemError(
            f"patch around cell {system.anchor} has {mat.shape[0]} equations"
            f" for {n} unknowns"
        )
    svals = np.linalg.svd(mat, compute_uv=False)
    smax = float(svals[0])
    smin = float(svals[-1])
    rank = int(np.count_nonzero(svals > RANK_REL_TOL * smax)) if smax > 0.0 else 0
    if rank < n:
        _, _, vh = np.linalg.svd(mat)
        null = vh[-1]
        raise SingularSystemError(
            _describe_null(system, null, rank, n), null_direction=tuple(float(v) for v in null)
        )
    q, r = np.linalg.qr(mat)
    z = np.linalg.solve(r, q.T @ rhs)
    residual = float(np.linalg.norm(mat @ z - rhs))
    bnorm = float(np.linalg.norm(rhs))
    if check_consistency and residual > CONSISTENCY_REL_TOL * bnorm:
        raise InconsistentSystemError(
            f"patch around cell {system.anchor} has least-squares residual"
            f" {residual:.3e} > {CONSISTENCY_REL_TOL:g} * ||b|| = "
            f"{CONSISTENCY_REL_TOL * bnorm:.3e}; ridges are not mirror-consistent",
            residual=residual,
            threshold=CONSISTENCY_REL_TOL * bnorm,
        )
    generators = {
        cell: Point2(float(z[2 * j]), float(z[2 * j + 1]))
        for j, cell in enumerate(system.members)
    }
    return PatchSolution(
        members=system.members,
        generators=generators,
        residual=residual,
        rank=rank,
        smin=smin,
        smax=smax,
    )


def _describe_null(system: PatchSystem, null: np.ndarray, rank: int, n: int) -> str:
    """Human-readable account of the free motion left by a rank-deficient patch."""
    msg = (
        f"patch around cell {system.anchor} is singular"
        f" (rank {rank} of {n})"
    )
    blocks = null.reshape(-1, 2)
    spread = float(np.max(np.abs(blocks - blocks[0])))
    if spread <= 1e-6:
        dx, dy = blocks[0]
        norm = float(np.hypot(dx, dy))
        if norm > 0.0:
            msg += (
                f"; generators may translate freely along ({dx / norm:.6f},"
                f" {dy / norm:.6f}), as happens when all patch ridges are parallel"
            )
    return msg
