"""
Conjugacy invariants and their derivatives along tangent fields.

Psi_H and Psi_T are evaluated at maps g near a reference map f whose
critical-orbit classification is frozen. Critical points and attracting
orbits of g are found by Newton continuation from the reference data; the
neighbourhood of f in which the invariants are defined is the set of maps
for which every continuation succeeds.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from prunedjulia.config import settings
from prunedjulia.exceptions import (
    AssumptionViolated,
    CombinatoricsBroken,
    DegenerateJacobian,
    DerivativeVanishes,
)
from prunedjulia.koenigs import KoenigsChart, build_chart
from prunedjulia.models import (
    CriticalClassification,
    CriticalTag,
    PeriodicOrbitRecord,
    PsiComponent,
    PsiValue,
)
from prunedjulia.orbits import iterate_with_derivative, residual_bound, stability_of
from prunedjulia.polymap import IntervalMap, PolyVectorField, as_polynomial, iterate, perturb
from prunedjulia.utils import parallel_map

logger = logging.getLogger(__name__)


def _scale(poly: Polynomial) -> float:
    return max(float(np.sum(np.abs(poly.coef))), 1.0)


def _require_complete(frozen: CriticalClassification) -> None:
    if frozen.partial:
        raise AssumptionViolated("The reference classification is partial")


def _attractor_has_periodic_critical(frozen: CriticalClassification, attractor: int) -> bool:
    orbit = frozen.attractors[attractor]
    return any(
        tag.kind == "PeriodicCritical"
        and min(abs(tag.c - p) for p in orbit.points) < settings.tol_hit
        for tag in frozen.tags
    )


def _members(frozen: CriticalClassification, attractor: int) -> List[CriticalTag]:
    return [tag for tag in frozen.tags if tag.kind == "AT" and tag.attractor == attractor]


def _relation_tags(frozen: CriticalClassification) -> List[CriticalTag]:
    exact = [tag for tag in frozen.tags if tag.kind in ("EC", "PeriodicCritical")]
    periodic = [tag for tag in frozen.tags if tag.kind == "EP"]
    return exact + periodic


def _label(tag: CriticalTag) -> str:
    prefix = "ep" if tag.kind == "EP" else "ec"
    return f"{prefix}:c{tag.index}"


# Continuation


def continue_critical_point(g: IntervalMap, c: float, order: int) -> float:
    """
    Follow a critical point of order l to a nearby map by Newton on D^(l-1) g.

    Args:
        g: Nearby interval map
        c: Reference critical point
        order: Its order l

    Returns:
        The continued critical point of g

    Raises:
        CombinatoricsBroken: If Newton does not converge near c
    """
    poly = g.derivative_polynomial(order - 1)
    slope = g.derivative_polynomial(order)
    x = float(c)
    for _ in range(50):
        s = slope(x)
        if s == 0:
            break
        step = poly(x) / s
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    if abs(x - c) > settings.continuation_radius or abs(poly(x)) > settings.tol_order * _scale(poly):
        raise CombinatoricsBroken(f"Critical point near {c:.6g} does not continue")
    return float(x)


def continue_periodic_orbit(g: IntervalMap, orbit: PeriodicOrbitRecord) -> PeriodicOrbitRecord:
    """
    Follow an attracting periodic orbit to a nearby map by Newton on g^r - x.

    The base point of the result continues ``orbit.points[0]``; the points are
    not re-sorted.

    Raises:
        CombinatoricsBroken: If Newton fails or the orbit stops attracting
    """
    r = orbit.period
    start = float(orbit.points[0])
    x = start
    deriv = 1.0
    for _ in range(50):
        value, deriv = iterate_with_derivative(g, x, r)
        slope = deriv - 1.0
        if abs(slope) < settings.tol_parabolic:
            raise CombinatoricsBroken(f"Orbit through {start:.6g} became neutral")
        step = (value - x) / slope
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    value, deriv = iterate_with_derivative(g, x, r)
    if abs(x - start) > settings.continuation_radius or abs(value - x) > residual_bound(deriv):
        raise CombinatoricsBroken(f"Periodic orbit through {start:.6g} does not continue")
    if abs(deriv) >= 1.0:
        raise CombinatoricsBroken(f"Orbit through {start:.6g} is no longer attracting")
    points = [float(x)]
    for _ in range(r - 1):
        points.append(float(g(points[-1])))
    multiplier = float(deriv)
    return PeriodicOrbitRecord(
        points=points, period=r, multiplier=multiplier, stability=stability_of(multiplier)
    )


def _continued_positions(g: IntervalMap, frozen: CriticalClassification) -> dict:
    return {tag.index: continue_critical_point(g, tag.c, tag.order) for tag in frozen.tags}


# Invariants


def _relation_components(
    g: IntervalMap, frozen: CriticalClassification, positions: dict
) -> List[PsiComponent]:
    components = []
    for tag in _relation_tags(frozen):
        c = positions[tag.index]
        if tag.kind == "EC":
            value = iterate(g, c, tag.q) - positions[tag.target]
        elif tag.kind == "PeriodicCritical":
            value = iterate(g, c, tag.period) - c
        else:
            value = iterate(g, c, tag.q) - iterate(g, c, tag.l)
        components.append(PsiComponent(label=_label(tag), value=float(value)))
    return components


def _attractor_block(
    g: IntervalMap, frozen: CriticalClassification, positions: dict, attractor: int
) -> List[PsiComponent]:
    continued = continue_periodic_orbit(g, frozen.attractors[attractor])
    block = []
    if not _attractor_has_periodic_critical(frozen, attractor):
        block.append(PsiComponent(label=f"multiplier:p{attractor}", value=continued.multiplier))

    members = _members(frozen, attractor)
    if len(members) <= 1:
        return block
    preferred = next(tag for tag in members if tag.preferred)
    anchor_point = float(iterate(g, positions[preferred.index], preferred.n_c or 0))
    chart = build_chart(g, continued, normalize_at=anchor_point)
    anchor = float(np.real(chart(anchor_point)))
    for tag in members:
        if tag.preferred:
            continue
        point = float(iterate(g, positions[tag.index], tag.n_c or 0))
        block.append(
            PsiComponent(
                label=f"phi:p{attractor}:c{tag.index}",
                value=anchor - float(np.real(chart(point))),
            )
        )
    return block


def psi_H(g: IntervalMap, frozen: CriticalClassification) -> PsiValue:
    """
    Evaluate the hybrid invariant at g.

    Components are ordered: exact critical relations (including periodic
    critical points) by index, eventually periodic relations by index, then
    one block per attractor holding its multiplier and the normalized
    Koenigs positions of the non-preferred critical points in its basin.

    Args:
        g: Map near the reference map
        frozen: Classification of the reference map

    Returns:
        Psi_H(g)

    Raises:
        CombinatoricsBroken: If a continuation fails
        AssumptionViolated: If the classification is partial
    """
    _require_complete(frozen)
    positions = _continued_positions(g, frozen)
    components = _relation_components(g, frozen, positions)
    blocks = parallel_map(
        lambda a: _attractor_block(g, frozen, positions, a), range(len(frozen.attractors))
    )
    for block in blocks:
        components.extend(block)
    return PsiValue(kind="H", components=components, dimension=len(components))


def psi_T(g: IntervalMap, frozen: CriticalClassification) -> PsiValue:
    """
    Evaluate the topological invariant at g.

    The attractor blocks of Psi_H are replaced by one component
    g^l(c) - g^l'(c') per coincidence between attracted critical orbits.
    """
    _require_complete(frozen)
    positions = _continued_positions(g, frozen)
    components = _relation_components(g, frozen, positions)
    for relation in frozen.relations:
        value = iterate(g, positions[relation.representative], relation.l_rep) - iterate(
            g, positions[relation.other], relation.l_other
        )
        components.append(
            PsiComponent(
                label=f"relation:c{relation.representative}:c{relation.other}", value=float(value)
            )
        )
    return PsiValue(kind="T", components=components, dimension=len(components))


# Derivatives


def orbit_derivative(f: IntervalMap, v: PolyVectorField, x, n: int):
    """
    Derivative v^n(x) = d/dt (f + t v)^n(x) at t = 0.

    Uses v^k(x) = v(f^(k-1) x) + Df(f^(k-1) x) * v^(k-1)(x) with v^0 = 0.
    """
    value = 0.0
    y = x
    for _ in range(n):
        value = v(y) + f.derivative(y) * value
        y = f(y)
    return value


def critical_velocity(f: IntervalMap, v: PolyVectorField, c: float, order: int) -> float:
    """Speed of a critical point of order l under f + t v."""
    return float(-v.derivative(c, order - 1) / f.derivative(c, order))


def _point_velocity(f: IntervalMap, v: PolyVectorField, c: float, speed: float, n: int) -> float:
    _, deriv = iterate_with_derivative(f, c, n)
    return float(orbit_derivative(f, v, c, n) + deriv * speed)


def _relation_rates(
    f: IntervalMap, v: PolyVectorField, frozen: CriticalClassification, speeds: dict
) -> List[PsiComponent]:
    components = []
    for tag in _relation_tags(frozen):
        head = _point_velocity(f, v, tag.c, speeds[tag.index], tag.q or tag.period)
        if tag.kind == "EC":
            value = head - speeds[tag.target]
        elif tag.kind == "PeriodicCritical":
            value = head - speeds[tag.index]
        else:
            value = head - _point_velocity(f, v, tag.c, speeds[tag.index], tag.l)
        components.append(PsiComponent(label=_label(tag), value=value))
    return components


def multiplier_velocity(f: IntervalMap, v: PolyVectorField, orbit: PeriodicOrbitRecord) -> float:
    """
    Derivative of the multiplier of the continued orbit under f + t v.

    The orbit point moves with speed v^r(p) / (1 - lambda) and each factor
    Df(y_j) of the multiplier changes by Dv(y_j) + D^2 f(y_j) * dy_j/dt.
    """
    r = orbit.period
    p = orbit.points[0]
    ys = [float(y) for y in orbit.points]
    slopes = [f.derivative(y) for y in ys]
    multiplier = float(np.prod(slopes))
    speed = orbit_derivative(f, v, p, r) / (1.0 - multiplier)
    total = 0.0
    for j, y in enumerate(ys):
        moving = _point_velocity(f, v, p, speed, j)
        rate = v.derivative(y) + f.derivative(y, 2) * moving
        others = np.prod([s for i, s in enumerate(slopes) if i != j]) if r > 1 else 1.0
        total += rate * others
    return float(total)


def _check_orbit_vanishing(v: PolyVectorField, orbit: PeriodicOrbitRecord, attractor: int) -> None:
    tol = settings.tol_vanishing * _scale(v.polynomial)
    for y in orbit.points:
        if abs(v(y)) > tol or abs(v.derivative(y)) > tol:
            raise AssumptionViolated(
                f"Koenigs position derivative needs v = v' = 0 along attractor p{attractor}"
            )


def chart_time_derivative(
    f: IntervalMap, v: PolyVectorField, chart: KoenigsChart, z: float
) -> float:
    """
    Derivative in t of the unnormalized chart of f + t v at a fixed point z.

    Requires v = v' = 0 along the attracting orbit, so that the orbit and its
    multiplier do not move. The derivative is the series
    sum_m phi'(F^(m+1) z) * V(F^m z) / lambda^(m+1) with F = f^r and
    V = v^r, summed until the terms are negligible.
    """
    total = 0.0
    y = z
    for m in range(chart.n_max):
        rate = orbit_derivative(f, v, y, chart.r)
        y = iterate(f, y, chart.r)
        term = chart.raw_derivative(y) * rate / chart.multiplier ** (m + 1)
        total += term
        if abs(y - chart.p) <= chart.radius and abs(term) <= settings.tol_koenigs * max(
            abs(total), 1e-300
        ):
            break
    return float(np.real(total))


def _phi_rates(
    f: IntervalMap,
    v: PolyVectorField,
    frozen: CriticalClassification,
    speeds: dict,
    attractor: int,
) -> List[PsiComponent]:
    orbit = frozen.attractors[attractor]
    members = _members(frozen, attractor)
    if len(members) <= 1:
        return []
    _check_orbit_vanishing(v, orbit, attractor)
    chart = build_chart(f, orbit)

    def position_and_rate(tag: CriticalTag) -> tuple[float, float, float]:
        n = tag.n_c or 0
        w = float(iterate(f, tag.c, n))
        moving = _point_velocity(f, v, tag.c, speeds[tag.index], n)
        value = float(np.real(chart.raw(w)))
        rate = float(np.real(chart.raw_derivative(w))) * moving + chart_time_derivative(
            f, v, chart, w
        )
        return w, value, rate

    preferred = next(tag for tag in members if tag.preferred)
    w0, value0, rate0 = position_and_rate(preferred)
    sign = -1.0 if w0 < chart.p else 1.0
    kappa = sign / value0
    components = []
    for tag in members:
        if tag.preferred:
            continue
        _, value, rate = position_and_rate(tag)
        phi = kappa * value
        components.append(
            PsiComponent(
                label=f"phi:p{attractor}:c{tag.index}",
                value=sign * phi * kappa * rate0 - kappa * rate,
            )
        )
    return components


def dpsi_H_analytic(
    f: IntervalMap, v: PolyVectorField, frozen: CriticalClassification
) -> PsiValue:
    """
    Directional derivative of Psi_H at f along v from closed formulas.

    Critical relations use v^q(c) - v^l(c) corrected by the motion of the
    critical points; multipliers use the chain rule along the moving orbit;
    Koenigs positions use the chart derivative together with the
    t-derivative of the chart itself.

    Args:
        f: Reference map (the map that was classified)
        v: Tangent field
        frozen: Classification of f

    Returns:
        d/dt Psi_H(f + t v) at t = 0, with the labels of ``psi_H``

    Raises:
        AssumptionViolated: If a Koenigs component is requested and v or v'
            does not vanish along the attracting orbit
    """
    _require_complete(frozen)
    speeds = {tag.index: critical_velocity(f, v, tag.c, tag.order) for tag in frozen.tags}
    components = _relation_rates(f, v, frozen, speeds)
    for attractor, orbit in enumerate(frozen.attractors):
        if not _attractor_has_periodic_critical(frozen, attractor):
            components.append(
                PsiComponent(
                    label=f"multiplier:p{attractor}", value=multiplier_velocity(f, v, orbit)
                )
            )
        components.extend(_phi_rates(f, v, frozen, speeds, attractor))
    return PsiValue(kind="H", components=components, dimension=len(components))


def dpsi_T_analytic(
    f: IntervalMap, v: PolyVectorField, frozen: CriticalClassification
) -> PsiValue:
    """Directional derivative of Psi_T at f along v."""
    _require_complete(frozen)
    speeds = {tag.index: critical_velocity(f, v, tag.c, tag.order) for tag in frozen.tags}
    components = _relation_rates(f, v, frozen, speeds)
    by_index = {tag.index: tag for tag in frozen.tags}
    for relation in frozen.relations:
        rep = by_index[relation.representative]
        other = by_index[relation.other]
        value = _point_velocity(f, v, rep.c, speeds[rep.index], relation.l_rep) - _point_velocity(
            f, v, other.c, speeds[other.index], relation.l_other
        )
        components.append(
            PsiComponent(label=f"relation:c{rep.index}:c{other.index}", value=value)
        )
    return PsiValue(kind="T", components=components, dimension=len(components))


def dpsi_finite_difference(
    f: IntervalMap,
    v: PolyVectorField,
    frozen: CriticalClassification,
    step: Optional[float] = None,
    kind: str = "H",
) -> PsiValue:
    """
    Central difference (Psi(f + h v) - Psi(f - h v)) / 2h.

    Args:
        f: Reference map
        v: Tangent field
        frozen: Classification of f
        step: Difference step h in [1e-8, 1e-3]
        kind: "H" or "T"

    Returns:
        Componentwise difference quotient

    Raises:
        AssumptionViolated: If the step is out of range
        CombinatoricsBroken: If f +- h v leaves the frozen combinatorics
    """
    step = settings.default_fd_step if step is None else step
    if not 1e-8 <= step <= 1e-3:
        raise AssumptionViolated(f"Difference step {step:g} is outside [1e-8, 1e-3]")
    evaluate = psi_H if kind == "H" else psi_T
    plus = evaluate(perturb(f, v, step), frozen)
    minus = evaluate(perturb(f, v, -step), frozen)
    components = [
        PsiComponent(label=a.label, value=(a.value - b.value) / (2.0 * step))
        for a, b in zip(plus.components, minus.components)
    ]
    return PsiValue(kind=plus.kind, components=components, dimension=len(components))


def max_relative_error(first: PsiValue, second: PsiValue) -> float:
    """Largest |a - b| / max(|a|, |b|, 1) over paired components."""
    errors = [
        abs(a - b) / max(abs(a), abs(b), 1.0) for a, b in zip(first.values, second.values)
    ]
    return float(max(errors, default=0.0))


# Horizontal and vertical fields


def induced_field(F, alpha) -> Polynomial:
    """The field v = alpha o F - DF * alpha as a polynomial."""
    poly = as_polynomial(F)
    field = as_polynomial(alpha)
    return field(poly) - poly.deriv() * field


def equivariance_residual(F, alpha, v, sample: Sequence[complex]) -> float:
    """
    Max over the sample of |v(z) - alpha(F(z)) + DF(z) alpha(z)|.

    Args:
        F: Map, as an interval map, polynomial or coefficients
        alpha: Polynomial vector field (or any vectorized callable)
        v: Polynomial vector field (or any vectorized callable)
        sample: Complex points
    """
    poly = as_polynomial(F)
    z = np.asarray(sample, dtype=complex)
    alpha = alpha if callable(alpha) else as_polynomial(alpha)
    v = v if callable(v) else as_polynomial(v)
    residual = np.abs(v(z) - alpha(poly(z)) + poly.deriv()(z) * alpha(z))
    return float(np.max(residual)) if residual.size else 0.0


@dataclass(frozen=True)
class SplittingSystem:
    """Boundary conditions on the field induced by a linear beta(z) = a z + b."""

    matrix: np.ndarray
    singular_values: np.ndarray
    solution: np.ndarray
    residual: float
    boundary: tuple[int, int]

    @property
    def unique(self) -> bool:
        return bool(self.singular_values.min() > settings.tol_vanishing)


def splitting_system(f: IntervalMap) -> SplittingSystem:
    """
    Linear system v(-1) = v(1) = 0 for v = beta o f - Df * beta, beta(z) = a z + b.

    Row x reads (f(x) - Df(x) x) a + (1 - Df(x)) b. For f(-1) = -1 the first
    row is (b - a)(1 - Df(-1)); the pattern f(-1) = f(1) = 1 is handled by
    the same rows.

    Returns:
        The matrix, its singular values and the least-squares solution of
        the homogeneous system
    """
    rows = []
    for x in (-1.0, 1.0):
        value = float(f(x))
        slope = float(f.derivative(x))
        rows.append([value - slope * x, 1.0 - slope])
    matrix = np.array(rows)
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    solution, *_ = np.linalg.lstsq(matrix, np.zeros(2), rcond=None)
    residual = float(np.linalg.norm(matrix @ solution))
    boundary = (int(round(float(f(-1.0)))), int(round(float(f(1.0)))))
    return SplittingSystem(
        matrix=matrix,
        singular_values=singular_values,
        solution=solution,
        residual=residual,
        boundary=boundary,
    )


@dataclass(frozen=True)
class TelescopingReport:
    """Telescoped vertical-field identity measured on a sample."""

    absolute_residual: float
    relative_residual: float
    alpha_norm: float
    field_norm: float
    ratio: float
    expansion: float
    constant: float
    pointwise_bound_holds: bool
    maximum_principle: bool

    @property
    def ratio_bound(self) -> float:
        """lambda A / (lambda - 1), infinite without expansion."""
        if self.expansion <= 1.0:
            return float("inf")
        return self.expansion * self.constant / (self.expansion - 1.0)


def vertical_telescoping_check(
    F, alpha: Callable, N: int, sample: Sequence[complex]
) -> TelescopingReport:
    """
    Check alpha(z) = alpha(F^N z)/DF^N(z) - sum_k v(F^k z)/DF^(k+1)(z).

    Here v = alpha o F - DF * alpha. Besides the absolute residual and the
    residual relative to the largest term, the report holds the sup norms of
    alpha and v on the sample, the measured expansion lambda = min |DF^N|
    and the constant A = max sum_k 1/|DF^(k+1)|. The
    bound |alpha(z)| <= |alpha(F^N z)|/lambda + A ||v|| always holds; the
    ratio bound ||alpha||/||v|| <= lambda A/(lambda - 1) follows from it
    whenever ||alpha o F^N|| <= ||alpha|| on the sample.

    Args:
        F: Map, as an interval map, polynomial or coefficients
        alpha: Vectorized callable (polynomial or rational field)
        N: Number of iterates
        sample: Complex points

    Raises:
        DerivativeVanishes: If some DF^(k+1)(z) vanishes on the sample
    """
    poly = as_polynomial(F)
    slope = poly.deriv()
    z = np.asarray(sample, dtype=complex)

    def field(x):
        return alpha(poly(x)) - slope(x) * alpha(x)

    orbit = [z]
    derivs = [np.ones_like(z)]
    for _ in range(N):
        derivs.append(derivs[-1] * slope(orbit[-1]))
        orbit.append(poly(orbit[-1]))
    if N and np.min(np.abs(np.array(derivs[1:]))) < settings.tol_vanishing:
        raise DerivativeVanishes("DF^k vanishes on the sample; resample away from critical points")

    values = alpha(z)
    head = alpha(orbit[N]) / derivs[N]
    terms = [field(orbit[k]) / derivs[k + 1] for k in range(N)]
    rebuilt = head - sum(terms, np.zeros_like(z))
    scale = np.maximum.reduce([np.ones(z.shape), np.abs(values), np.abs(head)] + [np.abs(t) for t in terms])
    error = np.abs(values - rebuilt)
    absolute_residual = float(np.max(error))
    relative_residual = float(np.max(error / scale))

    field_values = [np.abs(field(orbit[k])) for k in range(N)] or [np.abs(field(z))]
    field_norm = float(np.max(field_values))
    alpha_norm = float(np.max(np.abs(values)))
    pushed_norm = float(np.max(np.abs(alpha(orbit[N]))))
    expansion = float(np.min(np.abs(derivs[N])))
    constant = float(np.max(sum((1.0 / np.abs(derivs[k + 1]) for k in range(N)), np.zeros(z.shape))))
    pointwise = np.abs(values) <= (
        np.abs(alpha(orbit[N])) / np.abs(derivs[N]) + constant * field_norm
    ) * (1.0 + 1e-12) + 1e-300
    ratio = alpha_norm / field_norm if field_norm > 0 else float("inf")
    logger.debug(
        "telescoping N=%d: residual %.3g (relative %.3g), lambda %.6g, A %.6g",
        N,
        absolute_residual,
        relative_residual,
        expansion,
        constant,
    )
    return TelescopingReport(
        absolute_residual=absolute_residual,
        relative_residual=relative_residual,
        alpha_norm=alpha_norm,
        field_norm=field_norm,
        ratio=ratio,
        expansion=expansion,
        constant=constant,
        pointwise_bound_holds=bool(np.all(pointwise)),
        maximum_principle=pushed_norm <= alpha_norm,
    )


# Parabolic defining maps


@dataclass(frozen=True)
class ParabolicDefiningMap:
    """Value and Jacobian of a parabolic defining map."""

    values: np.ndarray
    jacobian: np.ndarray
    finite_difference: np.ndarray

    @property
    def block(self) -> np.ndarray:
        """Diagonal part, which carries the determinant at a parabolic point."""
        return np.diag(np.diag(self.jacobian))


def _composed(poly: Polynomial, n: int) -> Polynomial:
    result = Polynomial([0.0, 1.0])
    for _ in range(n):
        result = poly(result)
    return result


def _speed(poly: Polynomial, field: Polynomial, n: int) -> Polynomial:
    speed = Polynomial([0.0])
    inner = Polynomial([0.0, 1.0])
    slope = poly.deriv()
    for _ in range(n):
        speed = field(inner) + slope(inner) * speed
        inner = poly(inner)
    return speed


def _defining_values(
    g: Polynomial, fields: List[Polynomial], params: Sequence[float], n: int, x: float
) -> np.ndarray:
    poly = g
    for field, value in zip(fields, params):
        poly = poly + value * field
    power = _composed(poly, n)
    values = [power(x) - x, power.deriv()(x) - 1.0]
    if len(fields) == 2:
        values.append(power.deriv(2)(x))
    return np.array(values, dtype=float)


def parabolic_defining_map(
    g,
    v,
    n: int,
    t: float = 0.0,
    x: float = 0.0,
    w=None,
    s: float = 0.0,
) -> ParabolicDefiningMap:
    """
    Evaluate the defining map of a parabolic point and its Jacobian.

    Without ``w`` this is (t, x) -> ((g + t v)^n(x) - x, D(g + t v)^n(x) - 1),
    the saddle-node and period-doubling form. With ``w`` it is the pitchfork
    form (s, t, x) -> ((G^n)(x) - x, DG^n(x) - 1, D^2 G^n(x)) with
    G = g + s v + t w.

    Args:
        g: Local model (polynomial or coefficients)
        v: First perturbing field
        n: Period
        t: Parameter of v (of w in the pitchfork form)
        x: Point
        w: Second field for the pitchfork form
        s: Parameter of v in the pitchfork form

    Returns:
        Values, analytic Jacobian and central-difference Jacobian

    Raises:
        DegenerateJacobian: If a diagonal entry is below tolerance
    """
    base = as_polynomial(g)
    first = as_polynomial(v)
    if w is None:
        fields = [first]
        params = [t]
    else:
        fields = [first, as_polynomial(w)]
        params = [s, t]

    poly = base
    for field, value in zip(fields, params):
        poly = poly + value * field
    power = _composed(poly, n)
    speeds = [_speed(poly, field, n) for field in fields]
    rows = len(fields) + 1

    jacobian = np.zeros((rows, rows))
    for i in range(rows):
        for j, speed in enumerate(speeds):
            jacobian[i, j] = speed.deriv(i)(x) if i else speed(x)
        jacobian[i, rows - 1] = power.deriv(i + 1)(x) - (1.0 if i == 0 else 0.0)
    values = _defining_values(base, fields, params, n, x)

    h = settings.default_fd_step
    variables = list(params) + [x]
    numeric = np.zeros((rows, rows))
    for j in range(rows):
        up = list(variables)
        down = list(variables)
        up[j] += h
        down[j] -= h
        numeric[:, j] = (
            _defining_values(base, fields, up[:-1], n, up[-1])
            - _defining_values(base, fields, down[:-1], n, down[-1])
        ) / (2.0 * h)

    diagonal = np.abs(np.diag(jacobian))
    if np.any(diagonal < settings.tol_jacobian):
        raise DegenerateJacobian(
            "Diagonal of the defining-map Jacobian is degenerate: "
            + ", ".join(f"{d:.3g}" for d in np.diag(jacobian))
        )
    return ParabolicDefiningMap(values=values, jacobian=jacobian, finite_difference=numeric)
