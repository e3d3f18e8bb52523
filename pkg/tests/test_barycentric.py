"""
Tests for the barycentric extension.
"""

import numpy as np
import pytest

from prunedjulia.barycentric import barycentric_extension, barycentric_grid, boundary_map
from prunedjulia.config import override_settings
from prunedjulia.exceptions import (
    NoConvergence,
    NotInDisc,
    NotMonotone,
    QuadratureUnderresolved,
    ValidationFailure,
)


@pytest.fixture
def wobble():
    """Real-symmetric boundary map t + 0.1 sin(2 pi t)."""
    return boundary_map(sin=[0.1])


def test_identity():
    """Test that the identity extends to the identity."""
    value = barycentric_extension(boundary_map(), 0.3 + 0.2j)
    assert value.w == pytest.approx(0.3 + 0.2j, abs=1e-10)
    assert value.residual < 1e-10


def test_rotation():
    """Test that a rotation extends to the same rotation."""
    value = barycentric_extension(boundary_map(rotation=0.25), 0.3 + 0.2j)
    assert value.w == pytest.approx(-0.2 + 0.3j, abs=1e-10)


def test_real_symmetry(wobble):
    """Test w(conj z) = conj w(z) for an odd boundary map."""
    upper = barycentric_extension(wobble, 0.4 + 0.3j)
    lower = barycentric_extension(wobble, 0.4 - 0.3j)
    assert lower.w == pytest.approx(upper.w.conjugate(), abs=1e-9)
    assert barycentric_extension(wobble, 0.0).w == pytest.approx(0.0, abs=1e-10)


def test_summary(wobble):
    """Test the JSON report of a value."""
    report = barycentric_extension(wobble, 0.5j, M=512).summary()
    assert report.z == [0.0, 0.5]
    assert report.quadrature_points == 512


def test_outside_disc():
    """Test that |z| > 0.99 is refused."""
    with pytest.raises(NotInDisc) as exc_info:
        barycentric_extension(boundary_map(), 0.995)
    assert exc_info.value.exit_code == 2


def test_quadrature_too_small():
    """Test the minimum quadrature size."""
    with pytest.raises(ValidationFailure):
        barycentric_extension(boundary_map(), 0.1, M=100)


def test_not_monotone():
    """Test that a folding boundary map is refused."""
    with pytest.raises(NotMonotone):
        barycentric_extension(boundary_map(sin=[0.5]), 0.1)


def test_underresolved(wobble):
    """Test the quadrature doubling check."""
    with override_settings(tol_quadrature=-1.0):
        with pytest.raises(QuadratureUnderresolved) as exc_info:
            barycentric_extension(wobble, 0.5)
    assert exc_info.value.exit_code == 1


def test_no_convergence(wobble):
    """Test that an unreachable residual target stalls Newton iteration."""
    with override_settings(tol_barycentric=0.0):
        with pytest.raises(NoConvergence):
            barycentric_extension(wobble, 0.5)


def test_grid_keeps_order():
    """Test that threaded evaluation returns values in input order."""
    points = [0.1, 0.2j, -0.3, 0.4 - 0.1j]
    values = barycentric_grid(boundary_map(rotation=0.25), points, threads=2)
    assert [v.z for v in values] == points
    assert [v.w for v in values] == pytest.approx([1j * z for z in points], abs=1e-10)


IDENTITY_GRID = [0.0] + [r * np.exp(2j * np.pi * k / 8) for r in (0.3, 0.6, 0.9) for k in range(8)]


@pytest.mark.parametrize("z", IDENTITY_GRID)
def test_identity_on_grid(z):
    """Test w = z for the identity on |z| <= 0.9."""
    assert barycentric_extension(boundary_map(), z).w == pytest.approx(z, abs=1e-9)


@pytest.mark.parametrize("M", [512, 1024])
@pytest.mark.parametrize("z", [0.5, 0.3 + 0.4j, -0.2 - 0.6j])
def test_rotation_equivariance(wobble, M, z):
    """Test E(R_a o h o R_b)(z) = R_a E(h)(R_b z) as the quadrature is refined."""
    a, b = 0.15, 0.3

    def conjugated(t):
        return wobble(np.asarray(t) + b) + a

    left = barycentric_extension(conjugated, z, M).w
    right = np.exp(2j * np.pi * a) * barycentric_extension(wobble, np.exp(2j * np.pi * b) * z, M).w
    assert left == pytest.approx(right, abs=1e-7)
