"""
Tests for Koenigs charts.
"""

import numpy as np
import pytest

from prunedjulia.exceptions import NotInBasin, SuperAttracting
from prunedjulia.koenigs import build_chart, chart_for_attractor, koenigs_map, local_series
from prunedjulia.models import PeriodicOrbitRecord


def test_local_series_linear():
    """Test that a linear return map needs no correction."""
    series = local_series(np.array([0.0, 0.5, 0.0, 0.0]), 0.5)
    assert series.coef == pytest.approx([0.0, 1.0, 0.0, 0.0])


def test_local_series_conjugates():
    """Test phi(F(u)) = lambda phi(u) up to the truncation order."""
    jet = np.array([0.0, 0.5, 0.3, 0.1, 0.0, 0.0, 0.0])
    series = local_series(jet, 0.5)
    u = 1e-2
    F = np.polynomial.Polynomial(jet)
    assert series(F(u)) == pytest.approx(0.5 * series(u), abs=1e-12)


def test_normalized_chart_sends_right_of_p_to_plus_one(quad_map, quad_classification):
    """Test that the preferred critical point 0, right of p = -1/6, is sent to +1."""
    _, cls = quad_classification
    chart = chart_for_attractor(quad_map, cls, 0)
    assert chart(0.0) == pytest.approx(1.0)
    assert chart.summary().multiplier == pytest.approx(-0.4)


def test_normalized_chart_sends_left_of_p_to_minus_one(quad_map, quad_classification):
    """Test that a normalizing point left of p is sent to -1."""
    _, cls = quad_classification
    orbit = cls.attractors[0]
    assert -0.3 < orbit.points[0]
    chart = build_chart(quad_map, orbit, normalize_at=-0.3)
    assert chart(-0.3) == pytest.approx(-1.0)
    assert chart(quad_map(-0.3)) == pytest.approx(-0.4 * -1.0, rel=1e-8)


def test_functional_equation(quad_map, quad_classification):
    """Test phi(f(z)) = lambda phi(z) on the real line and off it."""
    _, cls = quad_classification
    chart = chart_for_attractor(quad_map, cls, 0)
    for z in (0.05, 0.3, -0.1 + 0.05j):
        assert chart(quad_map(z)) == pytest.approx(-0.4 * chart(z), rel=1e-8)


def test_chart_derivative_matches_difference(quad_map, quad_classification):
    """Test the chart derivative against a central difference."""
    _, cls = quad_classification
    chart = chart_for_attractor(quad_map, cls, 0)
    h = 1e-5
    numeric = (chart(0.2 + h) - chart(0.2 - h)) / (2 * h)
    assert chart.derivative(0.2) == pytest.approx(numeric, rel=1e-5)


def test_unnormalized_chart_tangent_to_identity(quad_map, quad_classification):
    """Test that the raw chart has derivative one at p."""
    _, cls = quad_classification
    chart = build_chart(quad_map, cls.attractors[0])
    assert chart.raw_derivative(cls.attractors[0].points[0]) == pytest.approx(1.0)


def test_koenigs_map(quad_map, quad_classification):
    """Test the convenience evaluator with normalization."""
    _, cls = quad_classification
    assert koenigs_map(quad_map, cls.attractors[0], 0.0, cls) == pytest.approx(1.0)


def test_superattracting_rejected(cube):
    """Test that a zero multiplier has no Koenigs chart."""
    orbit = PeriodicOrbitRecord(points=[0.0], period=1, multiplier=0.0, stability="SuperAttracting")
    with pytest.raises(SuperAttracting):
        build_chart(cube, orbit)


def test_repelling_rejected(cheb2):
    """Test that a repelling orbit has no chart."""
    orbit = PeriodicOrbitRecord(points=[-0.5], period=1, multiplier=-2.0, stability="Repelling")
    with pytest.raises(NotInBasin):
        build_chart(cheb2, orbit)


def test_point_outside_basin(quad_map, quad_classification):
    """Test that escaping points raise."""
    _, cls = quad_classification
    chart = chart_for_attractor(quad_map, cls, 0)
    with pytest.raises(NotInBasin) as exc_info:
        chart(5.0)
    assert exc_info.value.exit_code == 2
