"""
Tests for the conjugacy invariants and their derivatives.
"""

import numpy as np
import pytest
from numpy.polynomial import Polynomial

from prunedjulia.exceptions import (
    AssumptionViolated,
    CombinatoricsBroken,
    DegenerateJacobian,
    DerivativeVanishes,
)
from prunedjulia.invariants import (
    continue_critical_point,
    continue_periodic_orbit,
    dpsi_finite_difference,
    dpsi_H_analytic,
    dpsi_T_analytic,
    equivariance_residual,
    induced_field,
    max_relative_error,
    orbit_derivative,
    parabolic_defining_map,
    psi_H,
    psi_T,
    splitting_system,
    vertical_telescoping_check,
)
from prunedjulia.orbits import classify_critical_orbits, find_periodic_orbits
from prunedjulia.polymap import critical_structure, make_tangent_vector, perturb


# (map, max period, field, component kind)
TRANSVERSALITY_CASES = [
    ([-0.2, 0.0, 1.2], 4, [1.0, 0.0, -1.0], "multiplier"),
    ([-0.2, 0.0, 1.2], 4, [0.0, 0.0, 1.0, 0.0, -1.0], "multiplier"),
    ([-0.2, 0.0, 1.2], 4, [0.0, 1.0, 0.0, -1.0], "multiplier"),
    ([-0.2, 0.05, 1.2, -0.05], 4, [1.0, 0.0, -1.0], "multiplier"),
    ([-0.2, 0.05, 1.2, -0.05], 4, [0.0, 0.0, 1.0, 0.0, -1.0], "multiplier"),
    ([-1.0, 0.0, 2.0], 3, [1.0, 0.0, -1.0], "ep"),
    ([-1.0, 0.0, 2.0], 3, [0.0, -1.0, 0.0, 1.0], "ep"),
    ([0.0, -3.0, 0.0, 4.0], 3, [0.0, 1.0, 0.0, -1.0], "ep"),
    ([0.0, -3.0, 0.0, 4.0], 3, [0.0, 0.5, 0.0, 0.0, 0.0, -0.5], "ep"),
    ([0.0, 0.0, 0.0, 1.0], 2, [1.0, 0.0, 0.0, 0.0, -1.0], "ec"),
    ([0.0, -0.5, 0.0, 1.5], 3, [0.0, 0.0, 1.0, 0.0, -1.0], "phi"),
    ([0.0, -0.5, 0.0, 1.5], 3, [0.0, 0.0, 0.0, 1.0, 0.0, -1.0], "phi"),
]


@pytest.fixture
def lift_field(quad_map):
    """The tangent field 1 - x^2, which moves the multiplier at rate 2."""
    return make_tangent_vector(quad_map, [1.0, 0.0, -1.0])


def test_psi_H_multiplier(quad_map, quad_classification):
    """Test that Psi_H of 1.2x^2 - 0.2 is its multiplier."""
    _, cls = quad_classification
    value = psi_H(quad_map, cls)
    assert value.labels == ["multiplier:p0"]
    assert value.values == pytest.approx([-0.4])
    assert value.dimension == 1


def test_psi_T_empty(quad_map, quad_classification):
    """Test that one attracted critical point has no topological component."""
    _, cls = quad_classification
    assert psi_T(quad_map, cls).dimension == 0


def test_psi_H_nearby_map(quad_map, quad_classification, lift_field):
    """Test continuation to f + 0.01 v, where the multiplier is -0.38."""
    _, cls = quad_classification
    g = perturb(quad_map, lift_field, 0.01)
    assert psi_H(g, cls).values == pytest.approx([-0.38], rel=1e-9)


def test_psi_relation_vanishes(cheb2, cheb2_classification):
    """Test that the eventually periodic relation vanishes at the map itself."""
    _, cls = cheb2_classification
    value = psi_H(cheb2, cls)
    assert value.labels == ["ep:c0"]
    assert value.values[0] == pytest.approx(0.0, abs=1e-12)


def test_dpsi_analytic(quad_map, quad_classification, lift_field):
    """Test the closed-form multiplier derivative."""
    _, cls = quad_classification
    derivative = dpsi_H_analytic(quad_map, lift_field, cls)
    assert derivative.labels == ["multiplier:p0"]
    assert derivative.values == pytest.approx([2.0], rel=1e-9)


def test_dpsi_agrees_with_difference(quad_map, quad_classification, lift_field):
    """Test analytic against central-difference derivatives."""
    _, cls = quad_classification
    analytic = dpsi_H_analytic(quad_map, lift_field, cls)
    numeric = dpsi_finite_difference(quad_map, lift_field, cls)
    assert max_relative_error(analytic, numeric) < 1e-6


@pytest.mark.parametrize("coeffs,max_period,field,kind", TRANSVERSALITY_CASES)
def test_dpsi_H_transversality_suite(coeffs, max_period, field, kind):
    """Test analytic dPsi_H against central differences across the component kinds."""
    f = critical_structure(coeffs)
    cls = classify_critical_orbits(f, find_periodic_orbits(f, max_period))
    v = make_tangent_vector(f, field)
    analytic = dpsi_H_analytic(f, v, cls)
    numeric = dpsi_finite_difference(f, v, cls)
    assert any(label.startswith(kind) for label in analytic.labels)
    assert analytic.labels == numeric.labels
    assert max_relative_error(analytic, numeric) < 1e-5


def test_difference_error_is_second_order(quad_map, quad_classification):
    """Test that halving the step divides the central-difference error by four."""
    _, cls = quad_classification
    v = make_tangent_vector(quad_map, [0.0, 0.0, 10.0, 0.0, -10.0])
    exact = dpsi_H_analytic(quad_map, v, cls).values[0]
    errors = [
        abs(dpsi_finite_difference(quad_map, v, cls, step=step).values[0] - exact)
        for step in (1e-3, 5e-4)
    ]
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.05)


def test_dpsi_T_relation(cheb2, cheb2_classification):
    """Test that the topological derivative carries the relation rate."""
    _, cls = cheb2_classification
    v = make_tangent_vector(cheb2, [1.0, 0.0, -1.0])
    derivative = dpsi_T_analytic(cheb2, v, cls)
    assert derivative.labels == ["ep:c0"]


def test_difference_step_range(quad_map, quad_classification, lift_field):
    """Test that the difference step must lie in [1e-8, 1e-3]."""
    _, cls = quad_classification
    with pytest.raises(AssumptionViolated):
        dpsi_finite_difference(quad_map, lift_field, cls, step=1e-2)


def test_partial_classification_rejected(quad_map, quad_classification):
    """Test that a partial classification cannot be frozen."""
    _, cls = quad_classification
    with pytest.raises(AssumptionViolated):
        psi_H(quad_map, cls.model_copy(update={"partial": True}))


def test_continue_critical_point_fails(quad_map):
    """Test that a critical point cannot be continued from far away."""
    with pytest.raises(CombinatoricsBroken):
        continue_critical_point(quad_map, 0.9, 2)


def test_continue_periodic_orbit(quad_map, quad_classification, lift_field):
    """Test orbit continuation to a nearby map."""
    _, cls = quad_classification
    g = perturb(quad_map, lift_field, 0.01)
    orbit = continue_periodic_orbit(g, cls.attractors[0])
    assert orbit.points[0] == pytest.approx(-0.19 / 1.19)
    assert orbit.stability == "Attracting"


def test_induced_field(cheb2):
    """Test v = alpha o F - DF alpha for alpha(z) = z."""
    v = induced_field(cheb2, [0.0, 1.0])
    assert v.coef == pytest.approx([-1.0, 0.0, -2.0])
    sample = [0.3 + 0.1j, -0.5j, 0.7]
    assert equivariance_residual(cheb2, Polynomial([0.0, 1.0]), v, sample) == pytest.approx(0.0, abs=1e-14)


def test_splitting_system(cheb2):
    """Test the boundary system for 2x^2 - 1."""
    system = splitting_system(cheb2)
    assert system.matrix == pytest.approx(np.array([[-3.0, 5.0], [-3.0, -3.0]]))
    assert system.unique
    assert system.solution == pytest.approx([0.0, 0.0], abs=1e-14)
    assert system.boundary == (1, 1)


def test_vertical_telescoping(cheb2):
    """Test the telescoped identity and the pointwise bound."""
    alpha = Polynomial([0.1, 0.0, -0.1])
    sample = [0.3 + 0.2j, -0.6 + 0.1j, 0.8 - 0.15j]
    report = vertical_telescoping_check(cheb2, alpha, 3, sample)
    assert report.absolute_residual < 1e-9
    assert report.relative_residual < 1e-10
    assert report.pointwise_bound_holds
    assert report.expansion > 0


@pytest.mark.parametrize("N", [1, 3, 5])
@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_vertical_telescoping_random_pairs(N, seed):
    """Test the identity and the ratio bound on random (F, alpha) pairs, 20 points each."""
    rng = np.random.default_rng(seed)
    chebyshev = [[-1.0, 0.0, 2.0], [0.0, -3.0, 0.0, 4.0]][seed % 2]
    c = rng.uniform(0.8, 1.0)
    F = c * Polynomial(chebyshev) + (1.0 - c) * rng.uniform(-1.0, 1.0) * Polynomial([0.0, 1.0])
    alpha = Polynomial(rng.uniform(-1.0, 1.0, 4))
    sample = rng.uniform(-0.9, 0.9, 20) + 1j * rng.uniform(-1e-6, 1e-6, 20)
    report = vertical_telescoping_check(F, alpha, N, sample)
    assert report.absolute_residual < 1e-9
    assert report.pointwise_bound_holds
    if report.maximum_principle:
        assert report.ratio <= report.ratio_bound * (1.0 + 1e-9)


def test_vertical_telescoping_critical_sample(cheb2):
    """Test that samples on a critical point are refused."""
    with pytest.raises(DerivativeVanishes):
        vertical_telescoping_check(cheb2, Polynomial([0.1, 0.0, -0.1]), 2, [0.0])


def test_saddle_node_defining_map():
    """Test the defining map of x + x^2 perturbed by a constant."""
    result = parabolic_defining_map([0.0, 1.0, 1.0], [1.0], 1)
    assert result.values == pytest.approx([0.0, 0.0])
    assert result.jacobian == pytest.approx(np.array([[1.0, 0.0], [0.0, 2.0]]))
    assert result.finite_difference == pytest.approx(result.jacobian, abs=1e-6)


def test_degenerate_defining_map():
    """Test that a field vanishing at the point is degenerate."""
    with pytest.raises(DegenerateJacobian):
        parabolic_defining_map([0.0, 1.0, 1.0], [0.0, 0.0, 1.0], 1)


def test_orbit_derivative(quad_map, lift_field):
    """Test the t-derivative of the second iterate against a difference quotient."""
    assert orbit_derivative(quad_map, lift_field, 0.5, 2) == pytest.approx(1.17)
    h = 1e-6
    plus = perturb(quad_map, lift_field, h)
    minus = perturb(quad_map, lift_field, -h)
    numeric = (plus(plus(0.5)) - minus(minus(0.5))) / (2 * h)
    assert orbit_derivative(quad_map, lift_field, 0.5, 2) == pytest.approx(numeric, rel=1e-6)
