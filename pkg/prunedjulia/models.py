"""
Pydantic models for records and reports.

Defines the serializable data: interval map summaries, periodic orbits,
critical classifications, invariant values, tree and circle-map reports.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field

from prunedjulia.config import settings

Stability = Literal["Repelling", "Attracting", "SuperAttracting", "Parabolic"]
ParabolicSubtype = Literal["SaddleNode", "PeriodDoubling", "Pitchfork", "NotSimple"]
TagKind = Literal["EC", "EP", "AT", "PeriodicCritical", "Unresolved"]


def _schema_version() -> str:
    return settings.schema_version


class CriticalPointReport(BaseModel):
    """Critical point with its order."""

    c: float = Field(..., description="Critical point position")
    ell: int = Field(..., description="Order of the critical point", ge=2)


class MapReport(BaseModel):
    """Interval map summary."""

    coeffs: List[float] = Field(..., description="Normalized coefficients, ascending")
    a: float = Field(..., description="Strip half-width")
    nu: int = Field(..., description="Number of critical points")
    crit: List[CriticalPointReport] = Field(..., description="Critical points")
    sign: int = Field(..., description="Boundary sign: +1 iff f(1)=1")
    degree: int = Field(..., description="External degree, sum of orders")


class PeriodicOrbitRecord(BaseModel):
    """Periodic orbit with its multiplier and stability."""

    points: List[float] = Field(..., description="Orbit points, starting at the minimum")
    period: int = Field(..., description="Minimal period", ge=1)
    multiplier: float = Field(..., description="Derivative of f^r along the orbit")
    stability: Stability = Field(..., description="Stability class")
    subtype: Optional[ParabolicSubtype] = Field(
        None, description="Parabolic subtype when stability is Parabolic"
    )


class ParabolicNormalForm(BaseModel):
    """Classification of a neutral fixed point from its local Taylor data."""

    subtype: ParabolicSubtype = Field(..., description="Parabolic subtype")
    tau: Optional[float] = Field(None, description="Leading normal-form coefficient")
    composed_cubic: Optional[float] = Field(
        None, description="Cubic coefficient of the twice-composed model"
    )
    degenerate: bool = Field(default=False, description="Degenerate period doubling")


class CriticalTag(BaseModel):
    """Combinatorial tag of one critical point."""

    index: int = Field(..., description="Critical point index")
    c: float = Field(..., description="Critical point position")
    order: int = Field(..., description="Order of the critical point")
    kind: TagKind = Field(..., description="EC, EP, AT, PeriodicCritical or Unresolved")
    q: Optional[int] = Field(None, description="Iterate at which the relation closes")
    l: Optional[int] = Field(None, description="Iterate of the earlier coincident point")
    target: Optional[int] = Field(None, description="Index of the critical point hit")
    attractor: Optional[int] = Field(None, description="Index into attractors")
    n_c: Optional[int] = Field(None, description="Entry time into the immediate basin")
    preferred: bool = Field(default=False, description="Preferred point of its attractor")
    period: Optional[int] = Field(None, description="Period of a periodic critical point")


class OrbitRelation(BaseModel):
    """Two attracted critical points whose orbits coincide: f^l_rep(c) = f^l_other(c')."""

    representative: int = Field(..., description="Index of the representative point")
    other: int = Field(..., description="Index of the related point")
    l_rep: int = Field(..., description="Iterate of the representative")
    l_other: int = Field(..., description="Iterate of the related point")


class CriticalClassification(BaseModel):
    """Critical-orbit classification and codimension counts."""

    tags: List[CriticalTag] = Field(..., description="One tag per critical point")
    attractors: List[PeriodicOrbitRecord] = Field(
        default_factory=list, description="Orbits with multiplier of modulus below one"
    )
    relations: List[OrbitRelation] = Field(
        default_factory=list, description="Coincident attracted critical orbits"
    )
    is_semi_hyperbolic: bool = Field(..., description="Multiplier zero counted as hyperbolic")
    is_semi_hyperbolic_strict: bool = Field(
        ..., description="Stricter reading excluding periodic critical points"
    )
    is_hyperbolic: bool = Field(..., description="All critical points attracted")
    partial: bool = Field(default=False, description="Some critical orbit unresolved")
    nu: int = Field(..., description="Number of critical points")
    xi_noness_att: int = Field(..., description="Attractors without critical points")
    zeta: int = Field(..., description="Attracted critical points with disjoint orbits")
    nu_H: int = Field(..., description="Hybrid codimension")
    nu_T: int = Field(..., description="Topological codimension")


class PsiComponent(BaseModel):
    """One labelled component of an invariant."""

    label: str = Field(..., description="Producer of the component")
    value: float = Field(..., description="Component value")


class PsiValue(BaseModel):
    """Value (or derivative) of an invariant."""

    kind: Literal["H", "T"] = Field(..., description="Hybrid or topological invariant")
    components: List[PsiComponent] = Field(..., description="Ordered components")
    dimension: int = Field(..., description="Number of components")

    @property
    def values(self) -> List[float]:
        return [component.value for component in self.components]

    @property
    def labels(self) -> List[str]:
        return [component.label for component in self.components]


class KoenigsChartReport(BaseModel):
    """Koenigs chart summary."""

    p: float = Field(..., description="Base point")
    r: int = Field(..., description="Period")
    multiplier: float = Field(..., description="Multiplier")
    kappa: float = Field(..., description="Normalization constant")


class ClassifyReport(BaseModel):
    """Report of the classify command."""

    schema_version: str = Field(default_factory=_schema_version, description="Schema version")
    map: MapReport = Field(..., description="Analysed map")
    orbits: List[PeriodicOrbitRecord] = Field(..., description="Periodic orbits")
    classification: CriticalClassification = Field(..., description="Critical classification")
    charts: List[KoenigsChartReport] = Field(
        default_factory=list, description="Koenigs charts of the attractors"
    )


class PsiReport(BaseModel):
    """Report of the psi command."""

    schema_version: str = Field(default_factory=_schema_version, description="Schema version")
    map: MapReport = Field(..., description="Evaluated map")
    psi_H: PsiValue = Field(..., description="Hybrid invariant")
    psi_T: PsiValue = Field(..., description="Topological invariant")


class DPsiReport(BaseModel):
    """Report of the dpsi command."""

    schema_version: str = Field(default_factory=_schema_version, description="Schema version")
    field: List[float] = Field(..., description="Tangent field coefficients")
    analytic: PsiValue = Field(..., description="Analytic directional derivative")
    finite_difference: PsiValue = Field(..., description="Central difference")
    max_rel_err: float = Field(..., description="Largest relative disagreement")


class TreeGenerationReport(BaseModel):
    """Arc census of one generation."""

    n: int = Field(..., description="Generation")
    arc_count: int = Field(..., description="Arcs added in this generation")
    endpoints: List[List[float]] = Field(..., description="Arc tips as [re, im]")


class BasinReport(BaseModel):
    """Basin enclosure attached to the tree."""

    attractor: int = Field(..., description="Attractor index")
    point: float = Field(..., description="Attracting orbit point")
    lo: float = Field(..., description="Left end of the enclosure")
    hi: float = Field(..., description="Right end of the enclosure")
    radius: float = Field(..., description="Half-width of the covering disc")


class TreeReport(BaseModel):
    """Report of the prune command."""

    schema_version: str = Field(default_factory=_schema_version, description="Schema version")
    intervals: List[List[float]] = Field(..., description="Pruning intervals")
    generations: List[TreeGenerationReport] = Field(..., description="Per-generation census")
    total_arcs: int = Field(..., description="Arcs in the deepest tree")
    excluded_periodic_critical: List[float] = Field(
        ..., description="Periodic critical points excluded from attachment"
    )
    flags: List[str] = Field(default_factory=list, description="Condition warnings")
    basins: List[BasinReport] = Field(default_factory=list, description="Basin enclosures")
    small_basins: Optional[bool] = Field(None, description="Small-basins test result")


class CheckResult(BaseModel):
    """Outcome of one invariant check."""

    name: str = Field(..., description="Invariant name")
    passed: bool = Field(..., description="Whether the check passed")
    detail: str = Field(default="", description="Measured quantity or reason")


class CheckReport(BaseModel):
    """Report of an invariant suite."""

    schema_version: str = Field(default_factory=_schema_version, description="Schema version")
    target: str = Field(..., description="What was checked")
    checks: List[CheckResult] = Field(..., description="Individual results")
    passed: bool = Field(..., description="All checks passed")


class AngleReport(BaseModel):
    """Angle in turns, with its snapped rational when available."""

    value: float = Field(..., description="Angle in [0, 1)")
    exact: Optional[str] = Field(None, description="Snapped rational p/q")


class CircleMapReport(BaseModel):
    """Report of the circle command."""

    schema_version: str = Field(default_factory=_schema_version, description="Schema version")
    d: int = Field(..., description="Degree")
    eps: int = Field(..., description="Sign")
    jumps: List[float] = Field(..., description="Jump angles")
    jump_sizes: List[float] = Field(..., description="Jump sizes in lift units")
    min_slope: float = Field(..., description="Minimum slope of the lift")
    Q_g: List[float] = Field(..., description="Marked invariant set")


class SemiconjugacyReport(BaseModel):
    """Report of the semiconj command."""

    schema_version: str = Field(default_factory=_schema_version, description="Schema version")
    d: int = Field(..., description="Degree")
    eps: int = Field(..., description="Sign")
    depth: int = Field(..., description="Iterations used")
    residual: float = Field(..., description="Conjugacy residual on the grid")
    monotone: bool = Field(..., description="h nondecreasing on the grid")
    Q: List[AngleReport] = Field(..., description="Pruning set")


class ArcReport(BaseModel):
    """Closed arc [lo, hi] of the circle in turns; hi may exceed 1."""

    lo: float = Field(..., description="Start angle in [0, 1)")
    hi: float = Field(..., description="End angle, lo <= hi <= lo + 1")


class BoundaryCertificate(BaseModel):
    """Eventual periodicity of an arc boundary point."""

    angle: float = Field(..., description="Boundary angle")
    preperiod: int = Field(..., description="Preperiod")
    period: int = Field(..., description="Period")


class MarkovReport(BaseModel):
    """Report of the markov command."""

    schema_version: str = Field(default_factory=_schema_version, description="Schema version")
    N: int = Field(..., description="Depth of the Lambda sets")
    lambda_N: List[ArcReport] = Field(..., description="Lambda_N")
    lambda_prime_N: List[ArcReport] = Field(..., description="Lambda'_N, the ranges I'_j")
    domains: List[ArcReport] = Field(..., description="Intervals I_i")
    transitions: List[int] = Field(..., description="Range index j(i) of each I_i")
    expansion_iterate: int = Field(..., description="Iterate N' of the expansion pair")
    expansion_constant: float = Field(..., description="Measured expansion lambda")
    certificates: List[BoundaryCertificate] = Field(..., description="Boundary periodicity")


class BarycentricReport(BaseModel):
    """Report of the barycentric command."""

    schema_version: str = Field(default_factory=_schema_version, description="Schema version")
    z: List[float] = Field(..., description="Input point as [re, im]")
    w: List[float] = Field(..., description="Extension value as [re, im]")
    residual: float = Field(..., description="|G(z, w)|")
    quadrature_points: int = Field(..., description="Quadrature size")


# Input specs


class MapSpec(BaseModel):
    """Interval map input spec."""

    coeffs: List[float] = Field(..., description="Coefficients, ascending degree", min_length=2)
    a: float = Field(default=0.5, description="Strip half-width", gt=0)
    J: Optional[List[List[float]]] = Field(None, description="Default pruning intervals")
    depth: Optional[int] = Field(None, description="Default tree depth", ge=0)


class SeriesSpec(BaseModel):
    """Sine and cosine coefficients of the periodic part of a lift."""

    sin: List[float] = Field(default_factory=list, description="Coefficients of sin(2 pi k x)")
    cos: List[float] = Field(default_factory=list, description="Coefficients of cos(2 pi k x)")


class CircleSpec(BaseModel):
    """Circle map input spec."""

    d: int = Field(..., description="Degree")
    eps: int = Field(default=1, description="Sign")
    s: SeriesSpec = Field(default_factory=SeriesSpec, description="Periodic part of the lift")
    jumps: List[List[float]] = Field(default_factory=list, description="Jumps as [angle, size]")
    Q: Optional[List[float]] = Field(None, description="Marked invariant set")
    Q_period: Optional[int] = Field(None, description="Mark all points of this period", ge=1)
    Y: List[List[float]] = Field(default_factory=list, description="Open arcs covering the jumps")
    B0: List[List[float]] = Field(default_factory=list, description="Open arcs around attractors")
    N: int = Field(default=1, description="Depth of the Lambda sets", ge=0)
    radius: Optional[float] = Field(None, description="Jump neighbourhood radius", gt=0)


class BoundaryMapSpec(BaseModel):
    """Circle homeomorphism h(t) = t + rotation + sum_k sin_k sin(2 pi k t)."""

    rotation: float = Field(default=0.0, description="Rotation in turns")
    sin: List[float] = Field(default_factory=list, description="Coefficients of sin(2 pi k t)")


class ErrorResponse(BaseModel):
    """Error response model."""

    detail: str = Field(..., description="Error message")
