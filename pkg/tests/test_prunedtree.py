"""
Tests for pruning data, tree growth and the tree invariant suite.
"""

import numpy as np
import pytest

from prunedjulia.exceptions import ArcEscape, BasinTooLarge, IntervalConstraint, TreeTooLarge
from prunedjulia.polymap import critical_structure
from prunedjulia.prunedtree import (
    backward_orbit_violations,
    build_KXO,
    build_pruning_data,
    check_tree_invariants,
    grow_pruned_tree,
)
from prunedjulia.render import render_tree

QUAD_J = [(-0.21, -0.19)]


@pytest.fixture(scope="module")
def cube_tree(cube):
    """Tree of x^3 over J = (-0.001, 0.001), depth 3."""
    data = build_pruning_data(cube, [(-0.001, 0.001)])
    return grow_pruned_tree(cube, data, 3)


@pytest.fixture(scope="module")
def quad_tree(quad_map):
    """Tree of 1.2x^2 - 0.2 over J = (-0.21, -0.19), depth 3."""
    return grow_pruned_tree(quad_map, build_pruning_data(quad_map, QUAD_J), 3)


def test_cube_arcs(cube_tree):
    """Test the four arcs of J^{-1} at a critical point of order three."""
    assert cube_tree.arc_counts() == [0, 4, 4, 4]
    tips = sorted(cube_tree.data.endpoints, key=lambda z: (z.imag, z.real))
    assert np.abs(tips) == pytest.approx([0.1] * 4, rel=1e-9)
    assert cube_tree.excluded == pytest.approx((0.0,), abs=1e-9)


def test_cube_arcs_are_conjugate_pairs(cube_tree):
    """Test that pruning arcs come in conjugate pairs."""
    arcs = cube_tree.data.arcs
    for upper, lower in zip(arcs[::2], arcs[1::2]):
        assert lower.points == pytest.approx(np.conj(upper.points))


def test_quad_arc_counts(quad_tree):
    """Test the cumulative arc counts 2, 6, 10."""
    assert quad_tree.arc_counts() == [0, 2, 6, 10]
    assert quad_tree.data.flags == ()


def test_quad_first_arc(quad_tree):
    """Test that the first arc runs up the imaginary axis to f(z) = -0.21."""
    arc = quad_tree.generations[1][0]
    assert arc.attachment == pytest.approx(0.0, abs=1e-12)
    assert abs(arc.tip.imag) == pytest.approx(np.sqrt(0.01 / 1.2), rel=1e-9)
    assert np.max(np.abs(arc.points.real)) < 1e-9


def test_tree_summary(quad_tree):
    """Test the JSON report of a tree."""
    report = quad_tree.summary()
    assert report.total_arcs == 10
    assert [g.arc_count for g in report.generations] == [0, 2, 4, 4]
    assert report.intervals == [[-0.21, -0.19]]
    assert report.small_basins is None


def test_cube_invariants_pass(cube, cube_tree):
    """Test that the invariant suite passes on x^3."""
    report = check_tree_invariants(cube, cube_tree)
    assert report.passed, [c for c in report.checks if not c.passed]
    assert {c.name for c in report.checks} == {
        "tree.monotone",
        "tree.symmetry",
        "tree.connected",
        "tree.forward_invariant",
        "tree.strip",
        "tree.endpoints",
        "tree.excluded",
    }


def test_quad_structural_invariants(quad_map, quad_tree):
    """Test the structural checks on 1.2x^2 - 0.2."""
    report = check_tree_invariants(quad_map, quad_tree)
    results = {c.name: c.passed for c in report.checks}
    assert results["tree.monotone"]
    assert results["tree.symmetry"]
    assert results["tree.connected"]
    assert results["tree.strip"]


@pytest.mark.parametrize(
    "J",
    [
        [],
        [(0.1, 0.1)],
        [(-1.2, 0.0)],
        [(0.1, 0.2)],
        [(-0.21, -0.19), (-0.195, 0.1)],
        [(-0.21, -0.19), (0.3, 0.4)],
    ],
)
def test_invalid_intervals(quad_map, J):
    """Test that inadmissible pruning intervals are rejected."""
    with pytest.raises(IntervalConstraint) as exc_info:
        build_pruning_data(quad_map, J, check_basin=False)
    assert exc_info.value.exit_code == 2


def test_critical_value_on_boundary(cheb2):
    """Test that f(c) = -1 admits no pruning interval."""
    with pytest.raises(IntervalConstraint) as exc_info:
        build_pruning_data(cheb2, [(-0.5, 0.5)])
    assert "boundary" in exc_info.value.detail


def test_arc_escapes_narrow_strip():
    """Test that arcs leaving the strip are reported."""
    f = critical_structure([-0.2, 0.0, 1.2], 0.05)
    with pytest.raises(ArcEscape):
        build_pruning_data(f, QUAD_J, check_basin=False)


def test_basin_condition_flagged(quad_map):
    """Test that an interval containing the critical point is flagged."""
    data = build_pruning_data(quad_map, [(-0.3, 0.1)])
    assert data.flags == ("violates condition (3)",)
    assert any("f^-0(c_0)" in message for message in data.violations)


def test_backward_orbit_clean(quad_map):
    """Test that the narrow interval meets no backward critical orbit."""
    assert backward_orbit_violations(quad_map, QUAD_J) == []


def test_depth_guard(quad_map):
    """Test the depth guard."""
    data = build_pruning_data(quad_map, QUAD_J, check_basin=False)
    with pytest.raises(TreeTooLarge):
        grow_pruned_tree(quad_map, data, 13)


def test_basin_cover(quad_map, quad_classification):
    """Test the basin enclosure [-0.2, 0] and its covering disc."""
    _, cls = quad_classification
    tree = grow_pruned_tree(quad_map, build_pruning_data(quad_map, QUAD_J, check_basin=False), 1)
    covered = build_KXO(quad_map, tree, cls)
    assert covered.small_basins is True
    (cover,) = covered.basins
    assert (cover.lo, cover.hi) == pytest.approx((-0.2, 0.0), abs=1e-12)
    assert cover.radius == pytest.approx(0.1)


def test_basin_too_large(quad_classification):
    """Test that a basin disc wider than the strip is refused."""
    _, cls = quad_classification
    f = critical_structure([-0.2, 0.0, 1.2], 0.05)
    data = build_pruning_data(f, [(-0.2005, -0.1995)], check_basin=False)
    tree = grow_pruned_tree(f, data, 1)
    with pytest.raises(BasinTooLarge):
        build_KXO(f, tree, cls)


def test_cube_tree_is_four_rays(cube):
    """Test that K_8 of x^3 is I plus four segments of length 0.1 on the rays at k pi/3."""
    tree = grow_pruned_tree(cube, build_pruning_data(cube, [(-0.001, 0.001)]), 8)
    assert tree.arc_counts() == [0] + [4] * 8
    points = np.concatenate([arc.points for arc in tree.arcs()])
    rays = np.exp(1j * np.pi * np.array([1.0, 2.0, 4.0, 5.0]) / 3.0)
    along = np.real(points[:, None] * np.conj(rays))
    across = np.abs(np.imag(points[:, None] * np.conj(rays)))
    deviation = np.min(np.where(along >= -1e-12, across, np.inf), axis=1)
    assert np.max(deviation) < 1e-6
    assert np.max(np.abs(points)) == pytest.approx(0.1, rel=1e-9)


@pytest.mark.parametrize("J", [QUAD_J, [(-0.205, -0.195)]])
def test_quad_depth_eight(quad_map, J):
    """Test the depth-8 trees of 1.2x^2 - 0.2 for two pruning intervals."""
    tree = grow_pruned_tree(quad_map, build_pruning_data(quad_map, J), 8)
    counts = tree.arc_counts()
    assert all(later > earlier for earlier, later in zip(counts, counts[1:]))
    report = check_tree_invariants(quad_map, tree)
    assert report.passed, [c for c in report.checks if not c.passed]
    assert render_tree(tree).startswith("<svg")


def test_smaller_interval_shrinks_tree(quad_map):
    """Test that the first arcs get shorter as J gets smaller."""
    heights = []
    for J in (QUAD_J, [(-0.205, -0.195)]):
        tree = grow_pruned_tree(quad_map, build_pruning_data(quad_map, J), 1)
        heights.append(abs(tree.generations[1][0].tip.imag))
    assert heights == pytest.approx([np.sqrt(0.01 / 1.2), np.sqrt(0.005 / 1.2)], rel=1e-9)
