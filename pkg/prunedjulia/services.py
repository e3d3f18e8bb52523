"""
Service layer between the command line and the domain modules.

Loads map specs, runs the analyses and assembles the report models.
"""

import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from prunedjulia.barycentric import (
    barycentric_extension,
    barycentric_grid,
    boundary_map,
    check_lift,
)
from prunedjulia.config import settings
from prunedjulia.exceptions import (
    IntervalConstraint,
    NotInBasin,
    PrunedJuliaError,
    SuperAttracting,
    ValidationFailure,
)
from prunedjulia.external import (
    CircleMapE,
    arcs_contain,
    circular_distance,
    continuous_extension,
    extension_radius,
    lambda_sets,
    make_circle_map,
    markov_structure,
    pruning_set,
    semiconjugacy,
    semiconjugacy_summary,
)
from prunedjulia.invariants import (
    dpsi_finite_difference,
    dpsi_H_analytic,
    max_relative_error,
    psi_H,
    psi_T,
)
from prunedjulia.koenigs import chart_for_attractor
from prunedjulia.models import (
    BarycentricReport,
    BoundaryMapSpec,
    CheckReport,
    CheckResult,
    CircleMapReport,
    CircleSpec,
    ClassifyReport,
    CriticalClassification,
    DPsiReport,
    MapSpec,
    MarkovReport,
    PsiReport,
    SemiconjugacyReport,
)
from prunedjulia.orbits import classify_critical_orbits, find_periodic_orbits
from prunedjulia.polymap import IntervalMap, critical_structure, make_tangent_vector
from prunedjulia.prunedtree import (
    PrunedTree,
    build_KXO,
    build_pruning_data,
    check_tree_invariants,
    grow_pruned_tree,
)
from prunedjulia.render import render_lift, render_tree

logger = logging.getLogger(__name__)

SpecT = TypeVar("SpecT", bound=BaseModel)

Intervals = Sequence[Sequence[float]]

BOUNDARY_KEYS = {"rotation", "sin"}

# Points where the boundary suite evaluates the extension
BOUNDARY_POINTS = (0.0, 0.5, 0.3j, -0.4 - 0.4j)


def _read_json(source: str):
    text = source.strip()
    if not text.startswith("{"):
        path = Path(source)
        if not path.is_file():
            raise ValidationFailure(f"Spec file '{source}' not found")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationFailure(f"Spec is not valid JSON: {exc}")


def load_spec(source: str, model: Type[SpecT]) -> SpecT:
    """
    Read a spec from a file path or an inline JSON object.

    Args:
        source: Path to a JSON file, or JSON text starting with "{"
        model: Spec model to validate against

    Returns:
        The validated spec

    Raises:
        ValidationFailure: If the file is missing or the JSON is invalid
    """
    try:
        return model.model_validate(_read_json(source))
    except ValidationError as exc:
        raise ValidationFailure(f"Invalid {model.__name__}: {exc.errors()[0]['msg']}")


def spec_kind(source: str) -> str:
    """
    Kind of a spec.

    "interval" when it has coefficients, "boundary" when it only names a
    rotation and sine terms, "circle" otherwise.
    """
    data = _read_json(source)
    if not isinstance(data, dict):
        raise ValidationFailure("Spec must be a JSON object")
    if "coeffs" in data:
        return "interval"
    if set(data) <= BOUNDARY_KEYS:
        return "boundary"
    return "circle"


def default_intervals(f: IntervalMap) -> List[tuple[float, float]]:
    """Intervals of half-width default_pruning_halfwidth around the distinct critical values."""
    width = settings.default_pruning_halfwidth
    values = sorted({round(v, 12) for v in f.critical_values()})
    return [(v - width, v + width) for v in values]


class AnalysisService:
    """
    Runs analyses on interval maps and circle maps.

    Each public method returns a report model or a rendered document; errors
    propagate as ``PrunedJuliaError`` subclasses.
    """

    def load_map(self, source: str) -> tuple[IntervalMap, MapSpec]:
        spec = load_spec(source, MapSpec)
        return critical_structure(spec.coeffs, spec.a), spec

    def load_circle(self, source: str) -> tuple[CircleMapE, CircleSpec]:
        spec = load_spec(source, CircleSpec)
        return make_circle_map(spec.model_dump(exclude_none=True)), spec

    def classification(
        self,
        f: IntervalMap,
        max_period: Optional[int] = None,
        horizon: Optional[int] = None,
        threads: Optional[int] = None,
    ) -> tuple[list, CriticalClassification]:
        max_period = settings.default_max_period if max_period is None else max_period
        orbits = find_periodic_orbits(f, max_period, threads)
        cls = classify_critical_orbits(f, orbits, horizon=horizon, allow_partial=True)
        if cls.partial:
            logger.warning("classification is partial: some critical orbits are unresolved")
        return orbits, cls

    def classify(
        self,
        f: IntervalMap,
        max_period: Optional[int] = None,
        horizon: Optional[int] = None,
        threads: Optional[int] = None,
    ) -> ClassifyReport:
        """
        Periodic orbits, critical tags and Koenigs charts of a map.

        Charts are built for attractors with non-zero multiplier only.
        """
        orbits, cls = self.classification(f, max_period, horizon, threads)
        charts = []
        for k in range(len(cls.attractors)):
            try:
                charts.append(chart_for_attractor(f, cls, k).summary())
            except (SuperAttracting, NotInBasin) as exc:
                logger.debug("no chart for attractor %d: %s", k, exc.detail)
        return ClassifyReport(map=f.summary(), orbits=orbits, classification=cls, charts=charts)

    def psi(
        self, f: IntervalMap, max_period: Optional[int] = None, horizon: Optional[int] = None
    ) -> PsiReport:
        """Psi_H and Psi_T of a map against its own classification."""
        _, cls = self.classification(f, max_period, horizon)
        return PsiReport(map=f.summary(), psi_H=psi_H(f, cls), psi_T=psi_T(f, cls))

    def dpsi(
        self,
        f: IntervalMap,
        field: Sequence[float],
        step: Optional[float] = None,
        max_period: Optional[int] = None,
        horizon: Optional[int] = None,
    ) -> DPsiReport:
        """
        Analytic and finite-difference derivatives of Psi_H along a field.

        Raises:
            ConstraintViolation: If the field is not tangent at f
        """
        v = make_tangent_vector(f, field)
        _, cls = self.classification(f, max_period, horizon)
        analytic = dpsi_H_analytic(f, v, cls)
        numeric = dpsi_finite_difference(f, v, cls, step)
        return DPsiReport(
            field=list(v.coefficients),
            analytic=analytic,
            finite_difference=numeric,
            max_rel_err=max_relative_error(analytic, numeric),
        )

    def prune(
        self,
        f: IntervalMap,
        J: Optional[Intervals] = None,
        depth: Optional[int] = None,
        threads: Optional[int] = None,
        basins: bool = False,
        horizon: Optional[int] = None,
    ) -> PrunedTree:
        """
        Grow the pruned tree, optionally with the basin covers of K_{X,O}.

        Args:
            f: Interval map
            J: Pruning intervals; defaults to small intervals around the critical values
            depth: Tree depth N
            threads: Worker count
            basins: Attach basin enclosures
            horizon: Iterate budget of the classification
        """
        J = default_intervals(f) if J is None else J
        depth = settings.default_depth if depth is None else depth
        data = build_pruning_data(f, J)
        tree = grow_pruned_tree(f, data, depth, threads)
        if basins:
            _, cls = self.classification(f, horizon=horizon, threads=threads)
            tree = build_KXO(f, tree, cls, horizon)
        return tree

    def render(self, tree: PrunedTree) -> str:
        return render_tree(tree)

    def render_circle(self, g: CircleMapE) -> str:
        return render_lift(g)

    def circle(self, g: CircleMapE) -> CircleMapReport:
        return g.summary()

    def semiconj(self, g: CircleMapE, radius: Optional[float] = None) -> SemiconjugacyReport:
        """
        Semi-conjugacy of g to z -> eps z^d and its pruning set.

        Jumps are bridged first, with the given radius or the largest
        admissible one.
        """
        if g.jumps:
            radius = extension_radius(g) if radius is None else radius
            extension = continuous_extension(g, radius)
        else:
            extension = g
        h = semiconjugacy(extension)
        return semiconjugacy_summary(h, pruning_set(g, h))

    def markov(
        self,
        g: CircleMapE,
        Y: Intervals = (),
        B0: Intervals = (),
        N: int = 1,
    ) -> MarkovReport:
        """Markov structure on Lambda'_N."""
        arcs_Y = [tuple(arc) for arc in Y]
        arcs_B0 = [tuple(arc) for arc in B0]
        return markov_structure(g, arcs_Y, arcs_B0, N).summary()

    def barycentric(
        self,
        spec: BoundaryMapSpec,
        points: Sequence[complex],
        M: Optional[int] = None,
        threads: Optional[int] = None,
    ) -> List[BarycentricReport]:
        h = boundary_map(spec.rotation, spec.sin)
        return [value.summary() for value in barycentric_grid(h, points, M, threads)]

    # Invariant suites

    def check(
        self,
        source: str,
        J: Optional[Intervals] = None,
        depth: int = 4,
        threads: Optional[int] = None,
    ) -> CheckReport:
        """Run the invariant suite matching the kind of spec."""
        kind = spec_kind(source)
        if kind == "interval":
            f, spec = self.load_map(source)
            return self.check_map(f, J if J is not None else spec.J, depth, threads)
        if kind == "boundary":
            return self.check_boundary(load_spec(source, BoundaryMapSpec))
        g, spec = self.load_circle(source)
        return self.check_circle(g, spec)

    def check_map(
        self,
        f: IntervalMap,
        J: Optional[Intervals] = None,
        depth: int = 4,
        threads: Optional[int] = None,
    ) -> CheckReport:
        """
        Map invariants, then the tree suite when the pruning intervals are admissible.

        Inadmissible default intervals (for instance a critical value on the
        boundary) give a passing "not applicable" result.
        """
        checks = self._map_checks(f)
        try:
            tree = self.prune(f, J, depth, threads)
        except IntervalConstraint as exc:
            checks.append(CheckResult(name="tree", passed=True, detail=f"not applicable: {exc.detail}"))
        else:
            checks.extend(check_tree_invariants(f, tree).checks)
        return CheckReport(
            target="interval map", checks=checks, passed=all(check.passed for check in checks)
        )

    def _map_checks(self, f: IntervalMap) -> List[CheckResult]:
        ends = [float(f(-1.0)), float(f(1.0))]
        boundary = all(min(abs(v - 1.0), abs(v + 1.0)) <= settings.tol_boundary for v in ends)

        rng = np.random.default_rng(settings.seed)
        z = rng.uniform(-1.0, 1.0, 32) + 1j * rng.uniform(-f.domain_halfwidth, f.domain_halfwidth, 32)
        symmetry = float(np.max(np.abs(f(np.conj(z)) - np.conj(f(z)))))

        orders_ok = True
        for crit in f.critical_points:
            scale = max(1.0, float(np.sum(np.abs(f.derivative_polynomial(crit.order).coef))))
            vanish = [abs(f.derivative(crit.position, j)) for j in range(1, crit.order)]
            top = abs(f.derivative(crit.position, crit.order))
            orders_ok &= max(vanish) <= 1e-7 * scale and top > settings.tol_order * scale
        positions = f.positions
        ordered = all(-1.0 < a < b < 1.0 for a, b in zip(positions, positions[1:])) and all(
            -1.0 < c < 1.0 for c in positions
        )
        sign_ok = f.sign == (1 if ends[1] > 0 else -1)
        return [
            CheckResult(name="map.boundary", passed=boundary, detail=f"f(-1), f(1) = {ends[0]:.3g}, {ends[1]:.3g}"),
            CheckResult(name="map.symmetry", passed=symmetry <= 1e-12, detail=f"{symmetry:.3g}"),
            CheckResult(name="map.critical_orders", passed=orders_ok, detail=str(f.orders)),
            CheckResult(name="map.ordering", passed=ordered, detail=str([round(c, 9) for c in positions])),
            CheckResult(name="map.sign", passed=sign_ok, detail=str(f.sign)),
            CheckResult(
                name="map.degree",
                passed=f.degree == sum(f.orders),
                detail=f"d = {f.degree}",
            ),
        ]

    def check_circle(self, g: CircleMapE, spec: CircleSpec) -> CheckReport:
        """Lift periodicity, monotonicity, invariance of Q_g and nesting of the Lambda sets."""
        grid = np.linspace(0.0, 1.0, settings.circle_grid, endpoint=False)
        periodicity = float(np.max(np.abs(g.lift(grid + 1.0) - g.lift(grid) - g.degree)))
        slope = g.min_slope()
        drift = max(
            (min(float(circular_distance(g(q), other)) for other in g.marked) for q in g.marked),
            default=0.0,
        )
        checks = [
            CheckResult(name="circle.periodicity", passed=periodicity <= 1e-12, detail=f"{periodicity:.3g}"),
            CheckResult(name="circle.monotone", passed=slope > 0, detail=f"min slope {slope:.4g}"),
            CheckResult(name="circle.invariant", passed=drift <= 1e-9, detail=f"{drift:.3g}"),
        ]
        if g.jumps and not spec.Y:
            checks.append(
                CheckResult(name="lambda.nesting", passed=True, detail="not applicable: no arcs Y")
            )
        else:
            checks.append(self._nesting(g, spec))
        return CheckReport(
            target="circle map", checks=checks, passed=all(check.passed for check in checks)
        )

    def check_boundary(self, spec: BoundaryMapSpec) -> CheckReport:
        """Monotone lift, then a converged extension inside the disc at a few points."""
        h = boundary_map(spec.rotation, spec.sin)
        try:
            check_lift(h)
        except PrunedJuliaError as exc:
            monotone = CheckResult(name="boundary.monotone", passed=False, detail=exc.detail)
        else:
            slope = float(np.min(np.diff(h(np.linspace(0.0, 1.0, 4097)))) * 4096)
            monotone = CheckResult(
                name="boundary.monotone", passed=True, detail=f"min slope {slope:.4g}"
            )
        checks = [monotone]
        if monotone.passed:
            try:
                values = [barycentric_extension(h, z) for z in BOUNDARY_POINTS]
            except PrunedJuliaError as exc:
                checks.append(
                    CheckResult(name="boundary.extension", passed=False, detail=exc.detail)
                )
            else:
                residual = max(value.residual for value in values)
                inside = all(abs(value.w) < 1.0 for value in values)
                checks.append(
                    CheckResult(
                        name="boundary.extension",
                        passed=inside and residual < settings.tol_barycentric,
                        detail=f"max |G| = {residual:.3g} at {len(values)} points",
                    )
                )
        return CheckReport(
            target="boundary map", checks=checks, passed=all(check.passed for check in checks)
        )

    def _nesting(self, g: CircleMapE, spec: CircleSpec) -> CheckResult:
        Y = [tuple(arc) for arc in spec.Y]
        B0 = [tuple(arc) for arc in spec.B0]
        try:
            outer = lambda_sets(g, Y, B0, spec.N)
            inner = lambda_sets(g, Y, B0, spec.N + 1)
        except PrunedJuliaError as exc:
            return CheckResult(name="lambda.nesting", passed=False, detail=exc.detail)
        samples = np.linspace(0.0, 1.0, 100_003, endpoint=False)
        escaped = arcs_contain(inner.lambda_N, samples) & ~arcs_contain(outer.lambda_N, samples)
        escaped |= arcs_contain(inner.lambda_prime_N, samples) & ~arcs_contain(
            outer.lambda_prime_N, samples
        )
        return CheckResult(
            name="lambda.nesting",
            passed=not escaped.any(),
            detail=f"{int(escaped.sum())} samples of Lambda_{spec.N + 1} outside Lambda_{spec.N}",
        )


# Global service instance
analysis_service = AnalysisService()
