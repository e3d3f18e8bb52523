"""
Periodic orbits, parabolic normal forms and critical-orbit classification.

Periodic points are roots of f^r(x) - x on a Chebyshev grid of the interval,
refined by vectorized bisection and Newton. Critical orbits are followed up
to a horizon and tagged by the first relation they exhibit.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from prunedjulia.config import settings
from prunedjulia.exceptions import DegreeGuard, NotParabolic, Unresolved
from prunedjulia.models import (
    CriticalClassification,
    CriticalTag,
    OrbitRelation,
    ParabolicNormalForm,
    PeriodicOrbitRecord,
)
from prunedjulia.polymap import IntervalMap, iterate
from prunedjulia.utils import chebyshev_grid, parallel_map

logger = logging.getLogger(__name__)


def iterate_with_derivative(f: IntervalMap, x, n: int):
    """Return (f^n(x), Df^n(x)) for scalars or arrays."""
    deriv = np.ones_like(np.asarray(x, dtype=float)) if np.ndim(x) else 1.0
    for _ in range(n):
        deriv = deriv * f.derivative(x)
        x = f(x)
    return x, deriv


def residual_bound(multiplier: float) -> float:
    """Admissible |f^r(p) - p| for an orbit with the given multiplier."""
    return settings.tol_orbit_residual * max(1.0, abs(multiplier))


def stability_of(multiplier: float) -> str:
    """Stability class of a real multiplier."""
    size = abs(multiplier)
    if size < settings.tol_superattracting:
        return "SuperAttracting"
    if abs(size - 1.0) <= settings.tol_parabolic:
        return "Parabolic"
    return "Attracting" if size < 1.0 else "Repelling"


def return_map_jet(f: IntervalMap, p: float, r: int, order: int = 3) -> np.ndarray:
    """
    Taylor coefficients of u -> f^r(p + u) - p up to the given order.

    Returns:
        Array of length order + 1, ascending powers of u
    """
    jet = Polynomial([p, 1.0])
    for _ in range(r):
        jet = f.polynomial(jet).cutdeg(order)
    coef = np.zeros(order + 1)
    coef[: jet.coef.size] = jet.coef[: order + 1]
    coef[0] -= p
    return coef


def classify_parabolic(taylor: Sequence[float]) -> ParabolicNormalForm:
    """
    Classify a neutral fixed point from its local coefficients.

    Args:
        taylor: Triple (lambda, a, b) of f^n(x) = x0 + lambda*u + a*u^2 + b*u^3

    Returns:
        Subtype with the normal-form coefficient

    Raises:
        NotParabolic: If |lambda| differs from 1 beyond tolerance
    """
    multiplier, a, b = (float(t) for t in taylor)
    tol = settings.tol_parabolic
    if abs(abs(multiplier) - 1.0) > tol:
        raise NotParabolic(f"|lambda| = {abs(multiplier):.12g} is not 1")
    if multiplier < 0:
        cubic = -2.0 * (b + a * a)
        return ParabolicNormalForm(
            subtype="PeriodDoubling", composed_cubic=cubic, degenerate=abs(cubic) <= tol
        )
    if abs(a) > tol:
        return ParabolicNormalForm(subtype="SaddleNode", tau=a)
    if b < -tol:
        return ParabolicNormalForm(subtype="Pitchfork", tau=b)
    return ParabolicNormalForm(subtype="NotSimple")


def _bracket_roots(f: IntervalMap, r: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    g_lo = iterate(f, lo, r) - lo
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        g_mid = iterate(f, mid, r) - mid
        left = g_lo * g_mid <= 0
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
        g_lo = np.where(left, g_lo, g_mid)
    return 0.5 * (lo + hi)


def _tangential_roots(f: IntervalMap, r: int, grid: np.ndarray, values: np.ndarray) -> List[float]:
    size = np.abs(values)
    roots = []
    interior = np.arange(1, grid.size - 1)
    minima = interior[
        (size[interior] <= size[interior - 1])
        & (size[interior] <= size[interior + 1])
        & (size[interior] < 1e-6)
        & (values[interior - 1] * values[interior + 1] > 0)
    ]

    def slope(x: float) -> float:
        return iterate_with_derivative(f, x, r)[1] - 1.0

    for k in minima:
        a, b = grid[k - 1], grid[k + 1]
        if slope(a) * slope(b) < 0:
            x = brentq(slope, a, b, xtol=1e-15)
            if abs(iterate(f, x, r) - x) < settings.tol_orbit_residual:
                roots.append(float(x))
    return roots


def _polish(f: IntervalMap, x: float, r: int) -> float:
    for _ in range(8):
        value, deriv = iterate_with_derivative(f, x, r)
        slope = deriv - 1.0
        if abs(slope) < 1e-6:
            break
        step = (value - x) / slope
        x -= step
        if abs(step) < 1e-16:
            break
    return float(x)


def _minimal_period(f: IntervalMap, x: float, r: int) -> int:
    y = x
    deriv = 1.0
    for s in range(1, r + 1):
        deriv *= f.derivative(y)
        y = f(y)
        if r % s == 0 and abs(y - x) < residual_bound(deriv):
            return s
    return r


def _orbits_of_period(f: IntervalMap, r: int) -> List[PeriodicOrbitRecord]:
    grid = chebyshev_grid(settings.orbit_cells)
    values = iterate(f, grid, r) - grid
    candidates = [float(x) for x in grid[values == 0.0]]
    changes = np.nonzero(values[:-1] * values[1:] < 0)[0]
    if changes.size:
        candidates.extend(_bracket_roots(f, r, grid[changes], grid[changes + 1]).tolist())
    candidates.extend(_tangential_roots(f, r, grid, values))

    records: List[PeriodicOrbitRecord] = []
    seen: List[float] = []
    for x in candidates:
        x = _polish(f, x, r)
        if _minimal_period(f, x, r) != r:
            continue
        points = [x]
        for _ in range(r - 1):
            points.append(float(f(points[-1])))
        points = [_polish(f, p, r) for p in points]
        start = int(np.argmin(points))
        points = points[start:] + points[:start]
        if any(abs(points[0] - other) < 1e-7 for other in seen):
            continue
        seen.append(points[0])
        multiplier = float(np.prod([f.derivative(p) for p in points]))
        stability = stability_of(multiplier)
        subtype = None
        if stability == "Parabolic":
            jet = return_map_jet(f, points[0], r)
            subtype = classify_parabolic((multiplier, jet[2], jet[3])).subtype
        records.append(
            PeriodicOrbitRecord(
                points=points, period=r, multiplier=multiplier, stability=stability, subtype=subtype
            )
        )
    records.sort(key=lambda record: record.points[0])
    logger.debug("period %d: %d orbits", r, len(records))
    return records


def find_periodic_orbits(
    f: IntervalMap, max_period: int, threads: Optional[int] = None
) -> List[PeriodicOrbitRecord]:
    """
    Find all real periodic orbits of period up to max_period.

    Args:
        f: Interval map
        max_period: Largest period searched
        threads: Worker count for the per-period searches

    Returns:
        Minimal-period orbits, ordered by period then orbit minimum

    Raises:
        DegreeGuard: If max_period or the composed degree exceeds its guard
    """
    if max_period > settings.max_period_guard:
        raise DegreeGuard(f"max_period {max_period} exceeds {settings.max_period_guard}")
    if f.poly_degree ** max_period > settings.degree_guard:
        raise DegreeGuard(
            f"deg f^{max_period} = {f.poly_degree}^{max_period} exceeds {settings.degree_guard}"
        )
    per_period = parallel_map(
        lambda r: _orbits_of_period(f, r), range(1, max_period + 1), threads
    )
    return [record for records in per_period for record in records]


def periodic_critical_points(f: IntervalMap, max_period: int = 64) -> List[int]:
    """Indices of critical points c with f^k(c) = c for some k <= max_period."""
    indices = []
    for index, c in enumerate(f.positions):
        x = c
        for _ in range(max_period):
            x = f(x)
            if abs(x - c) < settings.tol_hit:
                indices.append(index)
                break
    return indices


def _converges(f: IntervalMap, x: float, target: float, r: int, steps: int) -> bool:
    for _ in range(steps):
        if abs(x - target) < settings.tol_attract:
            return True
        x = iterate(f, x, r)
    return abs(x - target) < settings.tol_attract


def immediate_basin(f: IntervalMap, orbit: PeriodicOrbitRecord) -> List[tuple[float, float]]:
    """
    Real immediate basin component of each point of an attracting orbit.

    The convergence predicate is evaluated on a Chebyshev grid and the edges
    of the run around each orbit point are bisected.

    Returns:
        One interval (lo, hi) per orbit point
    """
    r = orbit.period
    steps = max(settings.default_horizon // r, 1)
    grid = chebyshev_grid(settings.basin_grid)
    components = []
    for p in orbit.points:
        current = grid.copy()
        for _ in range(steps):
            current = iterate(f, current, r)
        inside = np.abs(current - p) < settings.tol_attract
        k = int(np.searchsorted(grid, p))
        edges = []
        for direction in (-1, 1):
            j = k if direction > 0 else k - 1
            last = p
            while 0 <= j < grid.size and inside[j] and (grid[j] - p) * direction >= 0:
                last = grid[j]
                j += direction
            if not 0 <= j < grid.size:
                edges.append(last)
                continue
            good, bad = last, grid[j]
            for _ in range(settings.basin_bisections):
                mid = 0.5 * (good + bad)
                if _converges(f, mid, p, r, steps):
                    good = mid
                else:
                    bad = mid
            edges.append(good)
        components.append((min(edges), max(edges)))
    return components


def _classify_one(
    f: IntervalMap,
    index: int,
    attracting: List[PeriodicOrbitRecord],
    horizon: int,
) -> CriticalTag:
    crit = f.critical_points[index]
    c = crit.position
    history = np.empty(horizon + 1)
    history[0] = c
    x = c
    for k in range(1, horizon + 1):
        x = float(f(x))
        history[k] = x
        for j, other in enumerate(f.positions):
            if abs(x - other) < settings.tol_hit:
                if j == index:
                    return CriticalTag(
                        index=index, c=c, order=crit.order, kind="PeriodicCritical", period=k
                    )
                return CriticalTag(
                    index=index, c=c, order=crit.order, kind="EC", q=k, target=j
                )
        if k >= 2:
            close = np.nonzero(np.abs(history[1:k] - x) < settings.tol_hit)[0]
            if close.size:
                return CriticalTag(
                    index=index, c=c, order=crit.order, kind="EP", l=int(close[0]) + 1, q=k
                )
        for a, orbit in enumerate(attracting):
            distance = min(abs(x - p) for p in orbit.points)
            landed = distance < settings.tol_landing and orbit.stability != "SuperAttracting"
            if distance < settings.tol_attract and not landed:
                return CriticalTag(index=index, c=c, order=crit.order, kind="AT", attractor=a)
    raise Unresolved(
        f"Orbit of critical point {index} (c={c:.6g}) unresolved after {horizon} iterates",
        index,
    )


def _entry_time(f: IntervalMap, c: float, component: tuple[float, float], horizon: int) -> int:
    x = c
    for n in range(horizon + 1):
        if component[0] <= x <= component[1]:
            return n
        x = float(f(x))
    return horizon


def shared_orbit_relations(
    f: IntervalMap, tags: List[CriticalTag], attracting: List[PeriodicOrbitRecord], horizon: int
) -> List[OrbitRelation]:
    """
    Group attracted critical points whose forward orbits coincide.

    Two points are related when f^l(c) = f^l'(c') for some l, l' >= 1 before
    either orbit enters the attracting neighbourhood.

    Returns:
        One relation per non-representative group member
    """

    def transient(tag: CriticalTag) -> List[float]:
        points = []
        x = tag.c
        orbit = attracting[tag.attractor].points
        for _ in range(horizon):
            x = float(f(x))
            if min(abs(x - p) for p in orbit) < settings.tol_attract:
                break
            points.append(x)
        return points

    attracted = [tag for tag in tags if tag.kind == "AT"]
    orbits = {tag.index: transient(tag) for tag in attracted}
    group_of = {tag.index: tag.index for tag in attracted}
    relations: List[OrbitRelation] = []
    for position, tag in enumerate(attracted):
        for rep in attracted[:position]:
            if group_of[rep.index] != rep.index or rep.attractor != tag.attractor:
                continue
            hit = _first_coincidence(orbits[rep.index], orbits[tag.index])
            if hit is not None:
                group_of[tag.index] = rep.index
                relations.append(
                    OrbitRelation(
                        representative=rep.index, other=tag.index, l_rep=hit[0], l_other=hit[1]
                    )
                )
                break
    return relations


def _first_coincidence(first: List[float], second: List[float]) -> Optional[tuple[int, int]]:
    if not first or not second:
        return None
    a = np.asarray(first)
    b = np.asarray(second)
    close = np.abs(a[:, None] - b[None, :]) < settings.tol_hit
    if not close.any():
        return None
    pairs = np.argwhere(close)
    best = min(pairs.tolist(), key=lambda pair: (pair[0] + pair[1], pair[0]))
    return best[0] + 1, best[1] + 1


def classify_critical_orbits(
    f: IntervalMap,
    orbits: List[PeriodicOrbitRecord],
    horizon: Optional[int] = None,
    allow_partial: bool = False,
) -> CriticalClassification:
    """
    Tag every critical point and fill the codimension counts.

    Args:
        f: Interval map
        orbits: Periodic orbits from ``find_periodic_orbits``
        horizon: Iterate budget per critical orbit
        allow_partial: Tag unresolved points instead of raising

    Returns:
        The classification

    Raises:
        Unresolved: If a critical orbit is not classified within the horizon
    """
    horizon = settings.default_horizon if horizon is None else horizon
    attracting = [o for o in orbits if o.stability in ("Attracting", "SuperAttracting")]

    tags: List[CriticalTag] = []
    for index, crit in enumerate(f.critical_points):
        try:
            tags.append(_classify_one(f, index, attracting, horizon))
        except Unresolved:
            if not allow_partial:
                raise
            logger.warning("critical point %d left unresolved", index)
            tags.append(
                CriticalTag(index=index, c=crit.position, order=crit.order, kind="Unresolved")
            )

    basins = {}
    for tag in tags:
        if tag.kind != "AT":
            continue
        orbit = attracting[tag.attractor]
        if tag.attractor not in basins:
            basins[tag.attractor] = immediate_basin(f, orbit)[0]
        tag.n_c = _entry_time(f, tag.c, basins[tag.attractor], horizon)
        if not any(t.preferred for t in tags if t.kind == "AT" and t.attractor == tag.attractor):
            tag.preferred = True

    relations = shared_orbit_relations(f, tags, attracting, horizon)
    related = {relation.other for relation in relations}
    zeta = sum(1 for tag in tags if tag.kind == "AT" and tag.index not in related)

    essential = set()
    for tag in tags:
        if tag.kind == "AT":
            essential.add(tag.attractor)
        if tag.kind == "PeriodicCritical":
            for a, orbit in enumerate(attracting):
                if min(abs(tag.c - p) for p in orbit.points) < settings.tol_hit:
                    essential.add(a)
    xi = len(attracting) - len(essential)

    has_neutral = any(o.stability == "Parabolic" for o in orbits)
    unresolved = any(tag.kind == "Unresolved" for tag in tags)
    ep_neutral = False
    for tag in tags:
        if tag.kind == "EP":
            _, deriv = iterate_with_derivative(f, float(iterate(f, tag.c, tag.l)), tag.q - tag.l)
            if abs(deriv - 1.0) <= settings.tol_multiplier_one:
                ep_neutral = True
    semi = not (has_neutral or unresolved or ep_neutral)
    strict = semi and not any(tag.kind == "PeriodicCritical" for tag in tags)
    hyperbolic = semi and all(tag.kind in ("AT", "PeriodicCritical") for tag in tags)
    nu = f.nu
    return CriticalClassification(
        tags=tags,
        attractors=attracting,
        relations=relations,
        is_semi_hyperbolic=semi,
        is_semi_hyperbolic_strict=strict,
        is_hyperbolic=hyperbolic,
        partial=unresolved,
        nu=nu,
        xi_noness_att=xi,
        zeta=zeta,
        nu_H=nu + xi,
        nu_T=nu - zeta,
    )


def count_codimensions(cls: CriticalClassification) -> tuple[int, int]:
    """Return (nu_H, nu_T) = (nu + xi_noness_att, nu - zeta)."""
    return cls.nu + cls.xi_noness_att, cls.nu - cls.zeta


def basin_enclosure(
    f: IntervalMap, cls: CriticalClassification, attractor: int, horizon: Optional[int] = None
) -> List[tuple[float, float]]:
    """
    Trapping interval of each point of an attracting orbit.

    Each interval is the hull of the orbit point and of the attracted
    critical orbits inside its immediate basin component, from their entry on.

    Returns:
        One interval (lo, hi) per orbit point
    """
    horizon = settings.default_horizon if horizon is None else horizon
    orbit = cls.attractors[attractor]
    components = immediate_basin(f, orbit)
    hulls = [[p, p] for p in orbit.points]
    for tag in cls.tags:
        if tag.kind != "AT" or tag.attractor != attractor:
            continue
        x = tag.c
        for _ in range(horizon):
            for j, (lo, hi) in enumerate(components):
                if lo <= x <= hi:
                    hulls[j][0] = min(hulls[j][0], x)
                    hulls[j][1] = max(hulls[j][1], x)
            if min(abs(x - p) for p in orbit.points) < settings.tol_landing:
                break
            x = float(f(x))
    return [(lo, hi) for lo, hi in hulls]
