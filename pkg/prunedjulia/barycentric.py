"""
Conformally natural extension of circle homeomorphisms to the disc.

The extension value w at z is the zero of

    G(z, w) = (1/M) sum_k (H_k - w) / (1 - conj(w) H_k) P(z, zeta_k)

where zeta_k are equally spaced on the circle, H_k = exp(2 pi i h(t_k)) and
P is the Poisson kernel. The zero is found by damped Newton iteration on the
real 2 x 2 Jacobian, started from the harmonic extension.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from prunedjulia.config import settings
from prunedjulia.exceptions import (
    NoConvergence,
    NotInDisc,
    NotMonotone,
    QuadratureUnderresolved,
    ValidationFailure,
)
from prunedjulia.models import BarycentricReport
from prunedjulia.utils import parallel_map

logger = logging.getLogger(__name__)

MIN_QUADRATURE = 256
MAX_RADIUS = 0.99
_MAX_NEWTON = 100

Lift = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class BarycentricValue:
    z: complex
    w: complex
    residual: float
    quadrature_points: int

    def summary(self) -> BarycentricReport:
        return BarycentricReport(
            z=[self.z.real, self.z.imag],
            w=[self.w.real, self.w.imag],
            residual=self.residual,
            quadrature_points=self.quadrature_points,
        )


def check_lift(h: Lift, samples: int = 4096) -> None:
    """
    Check that h lifts a degree-one orientation preserving homeomorphism.

    Raises:
        NotMonotone: If h decreases or h(t + 1) != h(t) + 1
    """
    t = np.linspace(0.0, 1.0, samples + 1)
    values = np.asarray(h(t), dtype=float)
    if np.any(np.diff(values) < -1e-12):
        raise NotMonotone("Boundary map is not monotone")
    shift = np.asarray(h(t + 1.0), dtype=float) - values
    if np.max(np.abs(shift - 1.0)) > 1e-9:
        raise NotMonotone("Boundary map does not satisfy h(t + 1) = h(t) + 1")


def _nodes(h: Lift, M: int):
    t = np.arange(M) / M
    zeta = np.exp(2j * np.pi * t)
    H = np.exp(2j * np.pi * np.asarray(h(t), dtype=float))
    return zeta, H


def _poisson(z: complex, zeta: np.ndarray) -> np.ndarray:
    return (1.0 - abs(z) ** 2) / np.abs(z - zeta) ** 2


def _residual(w: complex, H: np.ndarray, weights: np.ndarray) -> complex:
    return complex(np.mean((H - w) / (1.0 - np.conj(w) * H) * weights))


def _solve(z: complex, zeta: np.ndarray, H: np.ndarray) -> tuple[complex, float]:
    weights = _poisson(z, zeta)
    w = complex(np.mean(H * weights))
    if abs(w) >= 1.0:
        w = w / abs(w) * MAX_RADIUS
    F = _residual(w, H, weights)
    for _ in range(_MAX_NEWTON):
        if abs(F) < settings.tol_barycentric:
            return w, abs(F)
        denom = 1.0 - np.conj(w) * H
        dw = complex(np.mean(-weights / denom))
        dwbar = complex(np.mean(weights * (H - w) * H / denom**2))
        # Wirtinger derivatives to the real Jacobian of (Re F, Im F) in (Re w, Im w)
        jacobian = np.array(
            [
                [(dw + dwbar).real, (1j * (dw - dwbar)).real],
                [(dw + dwbar).imag, (1j * (dw - dwbar)).imag],
            ]
        )
        try:
            step = np.linalg.solve(jacobian, -np.array([F.real, F.imag]))
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"Singular Jacobian at w = {w:.6g}") from exc
        delta = complex(step[0], step[1])
        damping = 1.0
        while damping > 1e-6:
            candidate = w + damping * delta
            if abs(candidate) < 1.0:
                F_new = _residual(candidate, H, weights)
                if abs(F_new) < abs(F):
                    w, F = candidate, F_new
                    break
            damping /= 2
        else:
            break
    if abs(F) < settings.tol_barycentric:
        return w, abs(F)
    raise NoConvergence(f"Extension at z = {z:.6g} stalled with |G| = {abs(F):.3g}")


def barycentric_extension(h: Lift, z: complex, M: Optional[int] = None) -> BarycentricValue:
    """
    Evaluate the barycentric extension of h at a point of the disc.

    Args:
        h: Lift of the boundary map, with h(t + 1) = h(t) + 1
        z: Point with |z| <= 0.99
        M: Quadrature size, defaults to the configured quadrature_points

    Returns:
        The value w, the residual |G(z, w)| and the quadrature size

    Raises:
        ValidationFailure: If M is below 256
        NotInDisc: If |z| > 0.99
        NotMonotone: If h is not an orientation preserving lift
        NoConvergence: If Newton iteration stalls
        QuadratureUnderresolved: If doubling M moves w by more than tol_quadrature
    """
    M = settings.quadrature_points if M is None else int(M)
    if M < MIN_QUADRATURE:
        raise ValidationFailure(f"Quadrature size {M} is below {MIN_QUADRATURE}")
    z = complex(z)
    if abs(z) > MAX_RADIUS:
        raise NotInDisc(f"|z| = {abs(z):.6g} exceeds {MAX_RADIUS}")
    check_lift(h)

    w, residual = _solve(z, *_nodes(h, M))
    w_fine, _ = _solve(z, *_nodes(h, 2 * M))
    if abs(w_fine - w) > settings.tol_quadrature:
        raise QuadratureUnderresolved(
            f"Doubling the quadrature moves w by {abs(w_fine - w):.3g} at z = {z:.6g}"
        )
    logger.debug("barycentric: z=%s w=%s residual=%.3g", z, w, residual)
    return BarycentricValue(z=z, w=w, residual=residual, quadrature_points=M)


def barycentric_grid(
    h: Lift, points: Sequence[complex], M: Optional[int] = None, threads: Optional[int] = None
) -> List[BarycentricValue]:
    """Evaluate the extension at many points, in input order."""
    return parallel_map(lambda z: barycentric_extension(h, z, M), list(points), threads)


def boundary_map(rotation: float = 0.0, sin: Sequence[float] = ()) -> Lift:
    """Lift t -> t + rotation + sum_k sin_k sin(2 pi k t)."""
    coefficients = tuple(float(a) for a in sin)

    def h(t):
        t = np.asarray(t, dtype=float)
        value = t + rotation
        for k, a in enumerate(coefficients, start=1):
            value = value + a * np.sin(2 * np.pi * k * t)
        return value

    return h
