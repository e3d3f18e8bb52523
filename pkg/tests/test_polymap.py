"""
Tests for interval maps and tangent fields.
"""

import numpy as np
import pytest

from prunedjulia.exceptions import (
    ConstraintViolation,
    CriticalPointOnBoundary,
    DegreeGuard,
    NotBoundaryPreserving,
    OverflowEscape,
)
from prunedjulia.polymap import (
    IntervalMap,
    compose_power,
    critical_structure,
    evaluate_orbit,
    fit_tangent_vector,
    freezes_critical_points,
    iterate,
    make_tangent_vector,
    perturb,
)


def test_chebyshev_structure(cheb2):
    """Test the critical structure of 2x^2 - 1."""
    assert cheb2.nu == 1
    assert cheb2.positions[0] == pytest.approx(0.0, abs=1e-12)
    assert cheb2.orders == [2]
    assert cheb2.sign == 1
    assert cheb2.degree == 2


def test_cubic_order(cube):
    """Test that x^3 has one critical point of order three."""
    assert cube.nu == 1
    assert cube.orders == [3]
    assert cube.positions[0] == pytest.approx(0.0, abs=1e-9)


def test_two_critical_points(cheb3):
    """Test that 4x^3 - 3x has critical points at -1/2 and 1/2."""
    assert cheb3.positions == pytest.approx([-0.5, 0.5], abs=1e-12)
    assert cheb3.orders == [2, 2]
    assert cheb3.critical_values() == pytest.approx([1.0, -1.0], abs=1e-12)


def test_boundary_normalized():
    """Test that boundary values within tolerance are snapped exactly."""
    f = critical_structure([-1.0 + 1e-14, 0.0, 2.0])
    assert f(1.0) == pytest.approx(1.0, abs=1e-15)
    assert f(-1.0) == pytest.approx(1.0, abs=1e-15)


def test_not_boundary_preserving():
    """Test rejection of maps moving the boundary."""
    with pytest.raises(NotBoundaryPreserving) as exc_info:
        critical_structure([0.5, 0.0, 1.0])
    assert exc_info.value.exit_code == 2


def test_critical_point_on_boundary():
    """Test rejection of (3x - x^3)/2, critical at both ends."""
    with pytest.raises(CriticalPointOnBoundary):
        critical_structure([0.0, 1.5, 0.0, -0.5])


def test_from_factor():
    """Test building f = q(x)(x^2 - 1) + b(x)."""
    f = IntervalMap.from_factor([2.0], left=1, right=1)
    assert f.coefficients == pytest.approx((-1.0, 0.0, 2.0))


def test_evaluate_orbit(cheb2):
    """Test orbit and chain-rule derivative."""
    orbit, derivs = evaluate_orbit(cheb2, 0.5, 2)
    assert orbit == pytest.approx([0.5, -0.5, -0.5])
    assert derivs == pytest.approx([1.0, 2.0, -4.0])


def test_evaluate_orbit_escape(cheb2):
    """Test that escaping orbits raise."""
    with pytest.raises(OverflowEscape):
        evaluate_orbit(cheb2, 10.0, 10)


def test_iterate_vectorized(cheb2):
    """Test iteration on numpy arrays."""
    x = np.array([0.0, 1.0])
    assert iterate(cheb2, x, 2) == pytest.approx([1.0, 1.0])


def test_compose_power(cheb2):
    """Test that T2 o T2 = T4."""
    assert compose_power(cheb2, 2).coef == pytest.approx([1.0, 0.0, -8.0, 0.0, 8.0])


def test_compose_power_guard(cheb2):
    """Test the composed-degree guard."""
    with pytest.raises(DegreeGuard):
        compose_power(cheb2, 30)


def test_tangent_vector_valid(cube):
    """Test that x^2 - 1 is tangent at x^3."""
    v = make_tangent_vector(cube, [-1.0, 0.0, 1.0])
    assert v(0.5) == pytest.approx(-0.75)
    assert v.base_map is cube


def test_tangent_vector_lists_violations(cube):
    """Test that every failing condition is reported."""
    with pytest.raises(ConstraintViolation) as exc_info:
        make_tangent_vector(cube, [1.0, 1.0, 1.0])
    assert len(exc_info.value.violations) == 3
    assert exc_info.value.exit_code == 2


def test_freezes_critical_points(cube, quad_map):
    """Test the stronger freezing condition."""
    assert freezes_critical_points(make_tangent_vector(cube, [-1.0, 0.0, 0.0, 0.0, 1.0]))
    assert not freezes_critical_points(make_tangent_vector(cube, [-1.0, 0.0, 1.0]))
    assert not freezes_critical_points(make_tangent_vector(quad_map, [0.0, -1.0, 0.0, 1.0]))


def test_fit_tangent_vector(quad_map):
    """Test least-norm fitting of point conditions."""
    v = fit_tangent_vector(quad_map, [(0.5, 0, 0.25)], degree=4)
    assert v(0.5) == pytest.approx(0.25)
    assert v(1.0) == pytest.approx(0.0, abs=1e-12)
    assert v(-1.0) == pytest.approx(0.0, abs=1e-12)


def test_fit_tangent_vector_inconsistent(quad_map):
    """Test that contradictory conditions raise."""
    with pytest.raises(ConstraintViolation):
        fit_tangent_vector(quad_map, [(1.0, 0, 1.0)], degree=4)


def test_perturb(quad_map):
    """Test f + t v."""
    v = make_tangent_vector(quad_map, [1.0, 0.0, -1.0])
    g = perturb(quad_map, v, 0.1)
    assert g.coefficients == pytest.approx((-0.1, 0.0, 1.1))
    assert g.positions == pytest.approx([0.0], abs=1e-12)


def test_critical_points_between_grid_nodes():
    """Test root refinement when D f changes sign strictly between grid nodes."""
    f = critical_structure([-0.3, -3.0, 0.3, 4.0])
    root = np.sqrt(0.36 + 144.0)
    expected = [(-0.6 - root) / 24.0, (-0.6 + root) / 24.0]
    assert f.positions == pytest.approx(expected, abs=1e-12)
    assert f.orders == [2, 2]
    assert [abs(f.derivative(c)) for c in f.positions] == pytest.approx([0.0, 0.0], abs=1e-12)


def test_perturb_moves_critical_points_off_grid(cheb3):
    """Test that perturbing 4x^3 - 3x keeps two simple critical points."""
    g = perturb(cheb3, make_tangent_vector(cheb3, [0.0, 1.0, 0.0, -1.0]), 1e-5)
    assert g.orders == [2, 2]
    c = np.sqrt((3.0 - 1e-5) / (12.0 - 3e-5))
    assert g.positions == pytest.approx([-c, c])
