"""
Koenigs linearizing coordinates at attracting periodic points.

The chart is the limit of (f^{nr}(z) - p) / lambda^n. Each term of the
sequence is evaluated through the local Koenigs series of f^r at p, which
agrees with u + O(u^2), so the terms become stationary once the orbit is
close to p and the early exit fires before roundoff builds up.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np
from numpy.polynomial import Polynomial

from prunedjulia.config import settings
from prunedjulia.exceptions import NotInBasin, SuperAttracting
from prunedjulia.models import CriticalClassification, KoenigsChartReport, PeriodicOrbitRecord
from prunedjulia.polymap import IntervalMap, as_polynomial, iterate

logger = logging.getLogger(__name__)

MapLike = Union[IntervalMap, Polynomial]


def local_series(return_jet: np.ndarray, multiplier: float) -> Polynomial:
    """
    Solve phi(F(u)) = lambda * phi(u) for phi(u) = u + b_2 u^2 + ...

    Args:
        return_jet: Taylor coefficients of F(u) = f^r(p + u) - p
        multiplier: lambda = F'(0)

    Returns:
        The truncated series phi
    """
    order = return_jet.size - 1
    F = Polynomial(return_jet)
    powers = [Polynomial([1.0]), F.cutdeg(order)]
    for _ in range(2, order + 1):
        powers.append((powers[-1] * F).cutdeg(order))

    def coefficient(poly: Polynomial, k: int) -> float:
        return float(poly.coef[k]) if k < poly.coef.size else 0.0

    b = np.zeros(order + 1)
    b[1] = 1.0
    for k in range(2, order + 1):
        total = sum(b[j] * coefficient(powers[j], k) for j in range(1, k))
        b[k] = -total / (multiplier**k - multiplier)
    return Polynomial(b)


@dataclass(frozen=True)
class KoenigsChart:
    """Normalized Koenigs chart at an attracting periodic point."""

    poly: Polynomial
    p: float
    r: int
    multiplier: float
    kappa: float
    series: Polynomial
    radius: float
    n_max: int

    def _return_map(self, z):
        for _ in range(self.r):
            z = self.poly(z)
        return z

    def trajectory(self, z, n_max: Optional[int] = None) -> list:
        """
        Iterates z, F(z), ... of F = f^r until the local disc is reached.

        Raises:
            NotInBasin: If the local disc is not reached within n_max steps
        """
        limit = self.n_max if n_max is None else n_max
        points = [z]
        while abs(points[-1] - self.p) > self.radius:
            if len(points) > limit or not np.isfinite(points[-1]) or abs(points[-1]) > settings.escape_radius:
                raise NotInBasin(f"Orbit of {z} does not approach p={self.p:.6g}")
            points.append(self._return_map(points[-1]))
        return points

    def raw(self, z, n_max: Optional[int] = None):
        """Unnormalized chart value (f^{nr}(z) - p)/lambda^n in the limit."""
        points = self.trajectory(z, n_max)
        n = len(points) - 1
        term = self.series(points[-1] - self.p) / self.multiplier**n
        limit = self.n_max if n_max is None else n_max
        w = points[-1]
        while n < limit:
            w = self._return_map(w)
            n += 1
            following = self.series(w - self.p) / self.multiplier**n
            if abs(following - term) <= settings.tol_koenigs * max(abs(term), 1e-300):
                return following
            term = following
        return term

    def raw_derivative(self, z, n_max: Optional[int] = None):
        """Derivative of the unnormalized chart at z."""
        points = self.trajectory(z, n_max)
        slope = self.poly.deriv()
        deriv = 1.0
        for x in points[:-1]:
            y = x
            for _ in range(self.r):
                deriv = deriv * slope(y)
                y = self.poly(y)
        n = len(points) - 1
        return self.series.deriv()(points[-1] - self.p) * deriv / self.multiplier**n

    def __call__(self, z):
        return self.kappa * self.raw(z)

    def derivative(self, z):
        return self.kappa * self.raw_derivative(z)

    def summary(self) -> KoenigsChartReport:
        return KoenigsChartReport(p=self.p, r=self.r, multiplier=self.multiplier, kappa=self.kappa)


def build_chart(
    f: MapLike,
    orbit: PeriodicOrbitRecord,
    normalize_at: Optional[float] = None,
    point: int = 0,
    n_max: Optional[int] = None,
) -> KoenigsChart:
    """
    Build the Koenigs chart at one point of an attracting orbit.

    Args:
        f: Interval map or plain polynomial
        orbit: Attracting orbit record
        normalize_at: Point sent to -1 (left of p) or +1 (right of p); when
            omitted the chart is tangent to the identity at p
        point: Index of the base point in the orbit
        n_max: Iteration depth

    Returns:
        The chart

    Raises:
        SuperAttracting: If the multiplier is zero
        NotInBasin: If the orbit is not attracting or the normalizing point
            is outside the basin
    """
    multiplier = float(orbit.multiplier)
    if abs(multiplier) < settings.tol_superattracting:
        raise SuperAttracting("Koenigs coordinates need a non-zero multiplier")
    if abs(multiplier) >= 1.0:
        raise NotInBasin(f"Orbit with multiplier {multiplier:.6g} is not attracting")

    poly = as_polynomial(f)
    p = float(orbit.points[point])
    jet = Polynomial([p, 1.0])
    for _ in range(orbit.period):
        jet = poly(jet).cutdeg(settings.koenigs_order)
    coef = np.zeros(settings.koenigs_order + 1)
    coef[: jet.coef.size] = jet.coef[: settings.koenigs_order + 1]
    coef[0] = 0.0
    series = local_series(coef, multiplier)

    chart = KoenigsChart(
        poly=poly,
        p=p,
        r=orbit.period,
        multiplier=multiplier,
        kappa=1.0,
        series=series,
        radius=settings.koenigs_local_radius,
        n_max=settings.koenigs_depth if n_max is None else n_max,
    )
    if normalize_at is None:
        return chart
    # Left of p goes to -1, right of p to +1; for 1.2x^2 - 0.2 the point 0
    # lies right of p = -1/6, so phi(0) = +1.
    sign = -1.0 if normalize_at < p else 1.0
    kappa = sign / float(np.real(chart.raw(normalize_at)))
    logger.debug("koenigs chart at p=%.12g: kappa=%.12g", p, kappa)
    return replace(chart, kappa=kappa)


def normalizing_point(f: IntervalMap, cls: CriticalClassification, attractor: int) -> Optional[float]:
    """f^{n_c}(c(p)) for the preferred critical point of an attractor, if any."""
    for tag in cls.tags:
        if tag.kind == "AT" and tag.attractor == attractor and tag.preferred:
            return float(iterate(f, tag.c, tag.n_c or 0))
    return None


def chart_for_attractor(
    f: IntervalMap, cls: CriticalClassification, attractor: int, orbit: Optional[PeriodicOrbitRecord] = None
) -> KoenigsChart:
    """Normalized chart of an attractor of a classification."""
    orbit = cls.attractors[attractor] if orbit is None else orbit
    return build_chart(f, orbit, normalize_at=normalizing_point(f, cls, attractor))


def koenigs_map(
    f: MapLike,
    orbit: PeriodicOrbitRecord,
    z,
    cls: Optional[CriticalClassification] = None,
):
    """
    Evaluate the Koenigs coordinate of an attracting orbit at z.

    Args:
        f: Interval map or plain polynomial
        orbit: Attracting orbit record
        z: Point of the immediate basin
        cls: Classification providing the normalizing critical point

    Returns:
        phi(z)

    Raises:
        NotInBasin: If the iterates of z do not converge to p
        SuperAttracting: If the multiplier is zero
    """
    normalize_at = None
    if cls is not None and isinstance(f, IntervalMap):
        for index, candidate in enumerate(cls.attractors):
            if abs(candidate.points[0] - orbit.points[0]) < settings.tol_hit:
                normalize_at = normalizing_point(f, cls, index)
    return build_chart(f, orbit, normalize_at=normalize_at)(z)
