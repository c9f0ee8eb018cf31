"""Patch assembly and the one-shot QR solve.

The diamond fixture gives a hand-checkable 16x10 system; the hand-built
mirror_system helper lets us construct singular and inconsistent systems
that assemble_patch itself would refuse to produce.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from helpers import (
    max_cell_error,
    mirror_system,
    normal_equations_solve,
    transform_tessellation,
)
from vorogen.errors import (
    AnchorIneligibleError,
    InconsistentSystemError,
    SingularSystemError,
)
from vorogen.anchor import eligible_cells, select_anchor, AnchorPolicy
from vorogen.geom import reflect_point
from vorogen.solver import PatchSystem, assemble_patch, solve_patch
from vorogen.tessellation import neighbors


# ---------------------------------------------------------------- assembly


def test_diamond_system_shape_and_members(diamond):
    t, _ = diamond
    sys_ = assemble_patch(t, 4)
    assert sys_.anchor == 4
    # 4 anchor ridges + 4 ring ridges, 2 rows each; unknowns for 5 cells
    assert sys_.shape == (16, 10)
    assert sys_.k == 4
    # anchor first, then neighbors in first-appearance CCW order
    assert sys_.members == (4, 1, 3, 2, 0)
    assert sys_.column_block(4) == 0
    assert sys_.column_block(0) == 4


def test_diamond_row_pairs(diamond):
    t, _ = diamond
    sys_ = assemble_patch(t, 4)
    assert len(sys_.row_pairs) == 8
    # one anchor equation per CCW neighbor, then the ring closure
    assert sys_.row_pairs[:4] == ((4, 1), (4, 3), (4, 2), (4, 0))
    assert set(sys_.row_pairs[4:]) == {(1, 3), (3, 2), (2, 0), (0, 1)}


def test_row_structure_sparsity(diamond):
    """Each equation touches one source and one target block only."""
    t, _ = diamond
    sys_ = assemble_patch(t, 4)
    for row in sys_.matrix:
        nz = np.nonzero(np.abs(row) > 0.0)[0]
        assert len(nz) <= 4
        assert len({j // 2 for j in nz}) <= 2


def test_missing_ring_pair_drops_two_rows(diamond_missing_ring):
    t, _ = diamond_missing_ring
    sys_ = assemble_patch(t, 4)
    assert sys_.shape == (14, 10)
    assert (1, 3) not in sys_.row_pairs and (3, 1) not in sys_.row_pairs


def test_generic_patch_has_full_ring(built):
    # non-degenerate builds: every consecutive neighbor pair shares a ridge,
    # so the system is exactly 4k x 2(k+1)
    for n, seed in ((50, 3), (100, 7)):
        _, t, _ = built(n, seed)
        anchor = select_anchor(t, AnchorPolicy.best_score())
        sys_ = assemble_patch(t, anchor)
        k = len(neighbors(t, anchor))
        assert sys_.shape == (4 * k, 2 * (k + 1))


def test_unbounded_anchor_rejected(diamond):
    t, _ = diamond
    with pytest.raises(AnchorIneligibleError):
        assemble_patch(t, 0)


def test_true_generators_satisfy_system(diamond, built):
    """Stacked mirror equations are exact at the true generator positions."""
    cases = [diamond]
    for n, seed in ((100, 0), (250, 5)):
        _, t, gt = built(n, seed)
        cases.append((t, gt))
    for t, gt in cases:
        anchor = select_anchor(t, AnchorPolicy.best_score())
        sys_ = assemble_patch(t, anchor)
        z = np.empty(2 * len(sys_.members))
        for j, cell in enumerate(sys_.members):
            z[2 * j], z[2 * j + 1] = gt.generators[cell]
        assert np.max(np.abs(sys_.matrix @ z - sys_.rhs)) < 1e-10


# ------------------------------------------------------------------- solve


def test_diamond_solve_recovers_all_five(diamond):
    t, gt = diamond
    sol = solve_patch(assemble_patch(t, 4))
    assert sol.members == (4, 1, 3, 2, 0)
    assert len(sol.generators) == 5
    assert max_cell_error(sol.generators, gt) < 1e-10
    assert sol.residual < 1e-12
    assert sol.rank == 10
    assert sol.smin > 1e-8
    assert math.isfinite(sol.condition)


def test_solve_matches_normal_equations(built):
    """QR path vs the direct M^T M oracle."""
    for n, seed in ((50, 1), (100, 2), (200, 9)):
        _, t, _ = built(n, seed)
        anchor = select_anchor(t, AnchorPolicy.best_score())
        sys_ = assemble_patch(t, anchor)
        sol = solve_patch(sys_)
        z_ne = normal_equations_solve(sys_)
        for j, cell in enumerate(sys_.members):
            g = sol.generators[cell]
            assert abs(g.x - z_ne[2 * j]) < 1e-9
            assert abs(g.y - z_ne[2 * j + 1]) < 1e-9


def test_neighbors_are_reflections_of_anchor(built):
    # the solve must reproduce the defining mirror relation ridge by ridge
    _, t, _ = built(100, 4)
    anchor = select_anchor(t, AnchorPolicy.best_score())
    sol = solve_patch(assemble_patch(t, anchor))
    ga = sol.generators[anchor]
    for cid, rid in neighbors(t, anchor):
        mirrored = reflect_point(ga, t.ridge_line(rid))
        gn = sol.generators[cid]
        assert math.hypot(mirrored.x - gn.x, mirrored.y - gn.y) < 1e-10


def test_eligible_anchors_are_well_conditioned(built):
    _, t, _ = built(100, 11)
    for c in eligible_cells(t):
        sol = solve_patch(assemble_patch(t, c))
        assert sol.smin > 1e-8


def test_solution_accuracy_on_built_patches(built):
    for n, seed in ((50, 6), (200, 13)):
        _, t, gt = built(n, seed)
        anchor = select_anchor(t, AnchorPolicy.best_score())
        sol = solve_patch(assemble_patch(t, anchor))
        assert max_cell_error(sol.generators, gt) < 1e-10


# ---------------------------------------------------------------- failures


def _vertical_triple() -> PatchSystem:
    # three mirrors, all across vertical lines: x=1, x=2, x=3
    return mirror_system(
        (0, 1, 2),
        [
            (0, 1, (0.0, 1.0), (1.0, 0.0)),
            (0, 2, (0.0, 1.0), (2.0, 0.0)),
            (1, 2, (0.0, 1.0), (3.0, 0.0)),
        ],
    )


def test_all_parallel_mirrors_are_singular():
    sys_ = _vertical_triple()
    assert sys_.shape == (6, 6)
    with pytest.raises(SingularSystemError) as exc:
        solve_patch(sys_)
    assert "translate freely along" in str(exc.value)
    null = exc.value.null_direction
    assert null is not None and len(null) == 6
    # the free motion is one shared translation: equal (x, y) blocks, vertical
    blocks = [(null[2 * j], null[2 * j + 1]) for j in range(3)]
    for bx, by in blocks:
        assert abs(bx - blocks[0][0]) < 1e-9 and abs(by - blocks[0][1]) < 1e-9
        assert abs(bx) < 1e-9
        assert abs(abs(by) - 1.0 / math.sqrt(3.0)) < 1e-9


def test_underdetermined_raises():
    # 2 equations, 3 unknown generators: 4 rows for 6 columns
    sys_ = mirror_system(
        (0, 1, 2),
        [
            (0, 1, (0.0, 1.0), (1.0, 0.0)),
            (0, 2, (1.0, 0.0), (0.0, 1.0)),
        ],
    )
    with pytest.raises(SingularSystemError):
        solve_patch(sys_)


def test_perturbed_rhs_is_inconsistent(diamond):
    t, _ = diamond
    sys_ = assemble_patch(t, 4)
    sys_.rhs[3] += 1e-3  # fresh assembly, safe to poke
    with pytest.raises(InconsistentSystemError) as exc:
        solve_patch(sys_)
    assert exc.value.residual > exc.value.threshold > 0.0


def test_consistency_check_can_be_disabled(diamond):
    t, _ = diamond
    sys_ = assemble_patch(t, 4)
    sys_.rhs[3] += 1e-3
    sol = solve_patch(sys_, check_consistency=False)
    assert sol.residual > 0.0
    assert sol.rank == 10


# ------------------------------------------------------------- equivariance


def test_solution_is_translation_equivariant(built):
    _, t, gt = built(100, 8)
    dx, dy = 3.25, -1.5
    t2 = transform_tessellation(t, lambda p: (p[0] + dx, p[1] + dy), lambda d: d)
    anchor = select_anchor(t2, AnchorPolicy.best_score())
    sol = solve_patch(assemble_patch(t2, anchor))
    for c, g in sol.generators.items():
        tx, ty = gt.generators[c]
        assert math.hypot(g.x - (tx + dx), g.y - (ty + dy)) < 1e-10


def test_solution_is_rotation_equivariant(built):
    _, t, gt = built(100, 8)
    th = 0.7
    co, si = math.cos(th), math.sin(th)

    def rot(p):
        return (co * p[0] - si * p[1], si * p[0] + co * p[1])

    t2 = transform_tessellation(t, rot, rot)
    anchor = select_anchor(t2, AnchorPolicy.best_score())
    sol = solve_patch(assemble_patch(t2, anchor))
    for c, g in sol.generators.items():
        rx, ry = rot(gt.generators[c])
        assert math.hypot(g.x - rx, g.y - ry) < 1e-10
