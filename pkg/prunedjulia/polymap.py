"""
Real polynomial interval maps and their tangent vector fields.

An interval map fixes the boundary set {-1, 1} of I = [-1, 1] and carries its
real critical points with their orders. Tangent fields vanish on the boundary
and, at each critical point of order l, in the derivatives 1..l-2 so that
orders persist under f + t*v.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from prunedjulia.config import settings
from prunedjulia.exceptions import (
    ConstraintViolation,
    CriticalPointOnBoundary,
    DegreeGuard,
    NotBoundaryPreserving,
    OverflowEscape,
)
from prunedjulia.models import CriticalPointReport, MapReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CriticalPoint:
    """A real critical point and its order."""

    position: float
    order: int


@dataclass(frozen=True)
class IntervalMap:
    """
    Real polynomial map of [-1, 1] with marked critical points.

    Coefficients are in the monomial basis, ascending degree. Instances are
    built by ``critical_structure`` which normalizes the boundary values and
    locates the critical points.
    """

    coefficients: tuple[float, ...]
    domain_halfwidth: float
    critical_points: tuple[CriticalPoint, ...]
    sign: int
    degree: int

    @cached_property
    def polynomial(self) -> Polynomial:
        return Polynomial(self.coefficients)

    @cached_property
    def _derivatives(self) -> list[Polynomial]:
        polys = [self.polynomial]
        for _ in range(max(len(self.coefficients) - 1, 1)):
            polys.append(polys[-1].deriv())
        return polys

    @property
    def nu(self) -> int:
        return len(self.critical_points)

    @property
    def positions(self) -> list[float]:
        return [c.position for c in self.critical_points]

    @property
    def orders(self) -> list[int]:
        return [c.order for c in self.critical_points]

    @property
    def poly_degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, z):
        return self.polynomial(z)

    def derivative(self, z, order: int = 1):
        """
        Evaluate the derivative of the given order.

        Args:
            z: Real or complex point, or numpy array of points
            order: Derivative order (0 evaluates the map)

        Returns:
            D^order f(z)
        """
        return self.derivative_polynomial(order)(z)

    def derivative_polynomial(self, order: int) -> Polynomial:
        if order >= len(self._derivatives):
            return Polynomial([0.0])
        return self._derivatives[order]

    def critical_values(self) -> list[float]:
        return [float(self(c)) for c in self.positions]

    def summary(self) -> MapReport:
        """Build the JSON report of this map."""
        return MapReport(
            coeffs=list(self.coefficients),
            a=self.domain_halfwidth,
            nu=self.nu,
            crit=[CriticalPointReport(c=c.position, ell=c.order) for c in self.critical_points],
            sign=self.sign,
            degree=self.degree,
        )

    @classmethod
    def from_factor(
        cls,
        factor: Sequence[float],
        left: int = -1,
        right: int = 1,
        domain_halfwidth: float = 0.5,
    ) -> "IntervalMap":
        """
        Build f(x) = q(x)(x^2 - 1) + b(x) with prescribed boundary values.

        Args:
            factor: Coefficients of q, ascending
            left: Value f(-1), either -1 or 1
            right: Value f(1), either -1 or 1
            domain_halfwidth: Strip half-width a

        Returns:
            The validated interval map
        """
        base = Polynomial([(right + left) / 2.0, (right - left) / 2.0])
        poly = Polynomial(list(factor)) * Polynomial([-1.0, 0.0, 1.0]) + base
        return critical_structure(poly.coef, domain_halfwidth)


def _scale(poly: Polynomial) -> float:
    return max(float(np.sum(np.abs(poly.coef))), 1e-300)


def _normalize_boundary(coefficients: np.ndarray) -> np.ndarray:
    coeffs = coefficients.astype(float).copy()
    value_right = float(np.sum(coeffs))
    value_left = float(np.sum(coeffs * (-1.0) ** np.arange(coeffs.size)))
    targets = []
    for value in (value_left, value_right):
        target = 1.0 if value > 0 else -1.0
        if abs(value - target) > settings.tol_boundary:
            raise NotBoundaryPreserving(
                f"Boundary values f(-1)={value_left:.6g}, f(1)={value_right:.6g} "
                "are not in {-1, 1}"
            )
        targets.append(target)
    t_left, t_right = targets
    even = float(np.sum(coeffs[0::2]))
    odd = float(np.sum(coeffs[1::2]))
    coeffs[0] += (t_right + t_left) / 2.0 - even
    coeffs[1] += (t_right - t_left) / 2.0 - odd
    return coeffs


def _sign_change_roots(poly: Polynomial, grid: np.ndarray) -> list[float]:
    values = poly(grid)
    roots = [float(x) for x, v in zip(grid, values) if v == 0.0]
    changes = np.nonzero(values[:-1] * values[1:] < 0)[0]
    for k in changes:
        root = brentq(poly, grid[k], grid[k + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
        roots.append(root)
    return roots


def _newton(poly: Polynomial, x: float, iterations: int = 50) -> float:
    dpoly = poly.deriv()
    for _ in range(iterations):
        slope = dpoly(x)
        if slope == 0:
            break
        step = poly(x) / slope
        x -= step
        if abs(step) < settings.tol_newton:
            break
    return float(x)


def _order_at(derivatives: list[Polynomial], x: float) -> int | None:
    tol = settings.tol_order
    if abs(derivatives[1](x)) > tol * _scale(derivatives[1]):
        return None
    for j in range(2, len(derivatives)):
        if abs(derivatives[j](x)) > tol * _scale(derivatives[j]):
            return j
    return None


def critical_structure(coefficients: Iterable[float], domain_halfwidth: float = 0.5) -> IntervalMap:
    """
    Normalize a polynomial and locate its real critical points in (-1, 1).

    Candidates are sign changes of every derivative D^j f, j >= 1, so that
    roots of Df of even multiplicity are also seen. Each candidate is polished
    on D^(l-1) f, where l is the first non-vanishing derivative order.

    Args:
        coefficients: Real coefficients, ascending degree
        domain_halfwidth: Strip half-width a

    Returns:
        The validated interval map

    Raises:
        NotBoundaryPreserving: If f(-1) or f(1) is not in {-1, 1}
        CriticalPointOnBoundary: If Df(-1) = 0 or Df(1) = 0
    """
    coeffs = np.trim_zeros(np.asarray(list(coefficients), dtype=float), "b")
    if coeffs.size < 2:
        raise NotBoundaryPreserving("Constant maps do not preserve the boundary")
    coeffs = _normalize_boundary(coeffs)
    poly = Polynomial(coeffs)
    derivatives = [poly]
    for _ in range(poly.degree()):
        derivatives.append(derivatives[-1].deriv())

    for boundary in (-1.0, 1.0):
        if abs(derivatives[1](boundary)) <= settings.tol_order * _scale(derivatives[1]):
            raise CriticalPointOnBoundary(f"Df({boundary:+.0f}) vanishes")

    grid = np.linspace(-1.0, 1.0, settings.critical_cells + 1)
    candidates: list[float] = []
    for j in range(1, poly.degree()):
        candidates.extend(_sign_change_roots(derivatives[j], grid))

    found: list[CriticalPoint] = []
    for x in sorted(candidates):
        order = _order_at(derivatives, x)
        if order is None:
            continue
        x = _newton(derivatives[order - 1], x)
        order = _order_at(derivatives, x)
        if order is None or not -1.0 < x < 1.0:
            continue
        if found and abs(found[-1].position - x) < 1e-7:
            continue
        found.append(CriticalPoint(position=x, order=order))

    sign = 1 if poly(1.0) > 0 else -1
    degree = sum(c.order for c in found)
    logger.debug("critical structure: %s", [(c.position, c.order) for c in found])
    return IntervalMap(
        coefficients=tuple(float(c) for c in coeffs),
        domain_halfwidth=float(domain_halfwidth),
        critical_points=tuple(found),
        sign=sign,
        degree=degree,
    )


def evaluate_orbit(f: IntervalMap, z: complex, n: int) -> tuple[list, list]:
    """
    Iterate f and accumulate the chain-rule derivative.

    Args:
        f: Interval map
        z: Starting point, real or complex
        n: Number of iterates

    Returns:
        Tuple (orbit, derivatives) with orbit[k] = f^k(z) and
        derivatives[k] = Df^k(z), both of length n + 1

    Raises:
        OverflowEscape: If an iterate exceeds the escape radius
    """
    orbit = [z]
    derivs = [1.0]
    for k in range(n):
        current = orbit[-1]
        derivs.append(derivs[-1] * f.derivative(current))
        nxt = f(current)
        if abs(nxt) > settings.escape_radius:
            raise OverflowEscape(f"|f^{k + 1}(z)| exceeds {settings.escape_radius:g}")
        orbit.append(nxt)
    return orbit, derivs


def iterate(f: IntervalMap, z, n: int):
    """Return f^n(z) for scalars or numpy arrays."""
    for _ in range(n):
        z = f(z)
    return z


def as_polynomial(f) -> Polynomial:
    """Polynomial of an interval map, a Polynomial or a coefficient sequence."""
    if isinstance(f, IntervalMap):
        return f.polynomial
    if isinstance(f, Polynomial):
        return f
    return Polynomial(np.asarray(list(f), dtype=float))


def compose_power(f: IntervalMap, n: int) -> Polynomial:
    """
    Expand f^n as a polynomial.

    Raises:
        DegreeGuard: If the composed degree exceeds the guard
    """
    if f.poly_degree ** n > settings.degree_guard:
        raise DegreeGuard(f"deg f^{n} = {f.poly_degree}^{n} exceeds {settings.degree_guard}")
    result = Polynomial([0.0, 1.0])
    for _ in range(n):
        result = f.polynomial(result)
    return result


@dataclass(frozen=True)
class PolyVectorField:
    """Polynomial tangent vector at an interval map."""

    coefficients: tuple[float, ...]
    base_map: IntervalMap = field(repr=False)

    @cached_property
    def polynomial(self) -> Polynomial:
        return Polynomial(self.coefficients)

    def __call__(self, z):
        return self.polynomial(z)

    def derivative(self, z, order: int = 1):
        if order == 0:
            return self.polynomial(z)
        return self.polynomial.deriv(order)(z)


def _derivative_row(x: float, order: int, size: int) -> np.ndarray:
    row = np.zeros(size)
    for k in range(order, size):
        row[k] = math.perm(k, order) * x ** (k - order)
    return row


def _violations(f: IntervalMap, poly: Polynomial, top: int) -> list[str]:
    scale = max(_scale(poly), 1.0)
    tol = settings.tol_order * scale
    problems = []
    for boundary in (-1.0, 1.0):
        if abs(poly(boundary)) > tol:
            problems.append(f"v({boundary:+.0f}) = {poly(boundary):.3g} != 0")
    for index, crit in enumerate(f.critical_points):
        for j in range(1, crit.order - top + 1):
            value = poly.deriv(j)(crit.position)
            if abs(value) > tol:
                problems.append(
                    f"v^({j})(c_{index}) = {value:.3g} != 0 (order {crit.order})"
                )
    return problems


def make_tangent_vector(f: IntervalMap, coefficients: Iterable[float]) -> PolyVectorField:
    """
    Validate a tangent vector field at f.

    Args:
        f: Base interval map
        coefficients: Coefficients of v, ascending degree

    Returns:
        The validated field

    Raises:
        ConstraintViolation: Listing every failing condition
    """
    coeffs = np.asarray(list(coefficients), dtype=float)
    if coeffs.size == 0:
        coeffs = np.zeros(1)
    problems = _violations(f, Polynomial(coeffs), top=2)
    if problems:
        raise ConstraintViolation("; ".join(problems), problems)
    return PolyVectorField(coefficients=tuple(float(c) for c in coeffs), base_map=f)


def freezes_critical_points(v: PolyVectorField) -> bool:
    """Whether v^(j)(c_i) = 0 for 1 <= j <= l_i - 1 at every critical point."""
    return not _violations(v.base_map, v.polynomial, top=1)


def fit_tangent_vector(
    f: IntervalMap,
    conditions: Sequence[tuple[float, int, float]],
    degree: int,
    freeze: bool = True,
) -> PolyVectorField:
    """
    Solve for the least-norm tangent field meeting point conditions.

    Args:
        f: Base interval map
        conditions: Triples (x, j, value) imposing v^(j)(x) = value
        degree: Polynomial degree of v
        freeze: Also impose v^(j)(c_i) = 0 up to j = l_i - 1

    Returns:
        The validated field

    Raises:
        ConstraintViolation: If the linear system is inconsistent
    """
    size = degree + 1
    rows = [_derivative_row(-1.0, 0, size), _derivative_row(1.0, 0, size)]
    rhs = [0.0, 0.0]
    top = 1 if freeze else 2
    for crit in f.critical_points:
        for j in range(1, crit.order - top + 1):
            rows.append(_derivative_row(crit.position, j, size))
            rhs.append(0.0)
    for x, j, value in conditions:
        rows.append(_derivative_row(float(x), int(j), size))
        rhs.append(float(value))
    matrix = np.array(rows)
    target = np.array(rhs)
    solution, *_ = np.linalg.lstsq(matrix, target, rcond=None)
    residual = float(np.max(np.abs(matrix @ solution - target)))
    if residual > 1e-9 * max(1.0, float(np.max(np.abs(target)))):
        raise ConstraintViolation(
            f"Conditions are inconsistent at degree {degree} (residual {residual:.3g})"
        )
    return make_tangent_vector(f, solution)


def perturb(f: IntervalMap, v: PolyVectorField, t: float) -> IntervalMap:
    """Return the interval map f + t*v."""
    size = max(len(f.coefficients), len(v.coefficients))
    coeffs = np.zeros(size)
    coeffs[: len(f.coefficients)] += f.coefficients
    coeffs[: len(v.coefficients)] += t * np.asarray(v.coefficients)
    return critical_structure(coeffs, f.domain_halfwidth)
