"""
Poincare discs over real intervals and pullbacks along inverse branches.

D_theta(I) is the set of points z from which the interval I = [a, b] is
seen under an angle of at least theta, together with I itself. Its boundary
consists of two circular arcs through a and b, symmetric about the real
axis; theta = pi/2 gives the round disc with diameter I.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from prunedjulia.config import settings
from prunedjulia.exceptions import BranchAmbiguity, CriticalInDisc, IntervalConstraint
from prunedjulia.polymap import IntervalMap

logger = logging.getLogger(__name__)


def _check_angle(theta: float) -> None:
    if not 0.0 < theta < np.pi:
        raise IntervalConstraint(f"Angle {theta:g} is not in (0, pi)")


def subtended_angle(interval: Sequence[float], z) -> np.ndarray:
    """Angle |arg((a - z)/(b - z))| under which [a, b] is seen from z."""
    a, b = interval
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.abs(np.angle((a - z) / (b - z)))


def poincare_disc(interval: Sequence[float], theta: float, z) -> bool:
    """
    Membership of z in the Poincare disc D_theta(I).

    Args:
        interval: Real interval (a, b)
        theta: Angle in (0, pi)
        z: Complex point

    Returns:
        True if z lies in I or sees I under an angle >= theta
    """
    _check_angle(theta)
    a, b = interval
    z = complex(z)
    if z.imag == 0.0 and a <= z.real <= b:
        return True
    return bool(subtended_angle(interval, z) >= theta)


def disc_boundary(interval: Sequence[float], theta: float, samples: Optional[int] = None) -> np.ndarray:
    """
    Closed boundary curve of D_theta(I).

    The upper arc runs from b to a on the circle with centre m + i h cot(theta)
    and radius h / sin(theta), where m is the midpoint and h the half-length;
    the lower arc is its conjugate, run from a back to b.

    Returns:
        Complex array of 2 * samples points, starting at b
    """
    _check_angle(theta)
    samples = settings.disc_samples if samples is None else samples
    a, b = interval
    m = 0.5 * (a + b)
    h = 0.5 * (b - a)
    centre = m + 1j * h / np.tan(theta)
    radius = h / np.sin(theta)
    start = -(np.pi / 2 - theta)
    stop = np.pi + (np.pi / 2 - theta)
    angles = np.linspace(start, stop, samples)
    upper = centre + radius * np.exp(1j * angles)
    upper[0] = b
    upper[-1] = a
    lower = np.conj(upper[::-1])
    return np.concatenate([upper, lower])


def winding_number(curve: np.ndarray, point: complex) -> int:
    """Winding number of a closed polyline around a point."""
    d = np.asarray(curve, dtype=complex) - point
    if np.any(np.abs(d) == 0):
        return 1
    turns = np.angle(np.roll(d, -1) / d)
    return int(round(float(np.sum(turns)) / (2 * np.pi)))


def _inverse_along(f: IntervalMap, curve: np.ndarray, seed: complex) -> np.ndarray:
    """Lift a curve through f by Newton continuation from a seed preimage."""
    poly = f.polynomial
    slope = poly.deriv()
    lifted = np.empty_like(curve)
    z = complex(seed)
    for k, w in enumerate(curve):
        for _ in range(30):
            step = (poly(z) - w) / slope(z)
            z -= step
            if abs(step) <= 1e-15 * max(1.0, abs(z)):
                break
        if abs(poly(z) - w) > 1e-10 * max(1.0, abs(w)):
            raise BranchAmbiguity(f"Inverse branch lost at boundary sample {k}")
        lifted[k] = z
    return lifted


def pullback_angle(f: IntervalMap, interval: Sequence[float], steps: int, theta: float) -> float:
    """
    Angle control of a Poincare disc pulled back along a diffeomorphic chain.

    The chain is J_0 = interval, J_{j+1} = f(J_j). The disc D_theta(J_steps)
    is pulled back one step at a time along the inverse branches that map
    J_{j+1} onto J_j.

    Args:
        f: Interval map
        interval: Initial interval J_0
        steps: Length of the chain
        theta: Angle of the top disc

    Returns:
        The smallest angle t such that the pulled-back boundary lies in
        D_t(J_0)

    Raises:
        CriticalInDisc: If some J_j contains a critical point or some disc
            of the chain contains a critical value
        BranchAmbiguity: If Newton continuation loses the branch
    """
    _check_angle(theta)
    chain: List[tuple[float, float]] = [tuple(interval)]
    for _ in range(steps):
        lo, hi = chain[-1]
        for c in f.positions:
            if lo <= c <= hi:
                raise CriticalInDisc(f"Critical point {c:.6g} lies in [{lo:.6g}, {hi:.6g}]")
        ends = sorted((float(f(lo)), float(f(hi))))
        chain.append((ends[0], ends[1]))

    curve = disc_boundary(chain[-1], theta)
    critical_values = f.critical_values()
    for level in range(steps - 1, -1, -1):
        for value in critical_values:
            if winding_number(curve, value) != 0:
                raise CriticalInDisc(f"Critical value {value:.6g} lies in a pulled-back disc")
        lo, hi = chain[level]
        top = curve[0].real
        seed = lo if abs(f(lo) - top) < abs(f(hi) - top) else hi
        curve = _inverse_along(f, curve, seed)

    a, b = chain[0]
    tiny = 1e-12 * max(1.0, b - a)
    interior = curve[(np.abs(curve - a) > tiny) & (np.abs(curve - b) > tiny)]
    angle = float(np.min(subtended_angle(chain[0], interior)))
    logger.debug("pullback over %d steps: theta %.6g -> %.6g", steps, theta, angle)
    return angle
