"""
External circle maps of the class E^d_eps.

A map is given by its lift g*(x) = d x + c + s(x) + sum_j delta_j (1/2 - {x - x_j}),
where s is a sine/cosine series, c is 0 or 1/2 according to the sign, and the
sawtooth terms put an upward jump of size delta_j at each jump angle x_j.
Angles are in turns. Arc arithmetic is done on the lift, with open arcs kept
as sub-intervals of [0, 1] and closed arcs returned as (lo, hi) with lo in
[0, 1) and hi <= lo + 1.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from prunedjulia.config import settings
from prunedjulia.exceptions import (
    BoundaryNotEventuallyPeriodic,
    EndpointOnJump,
    JumpsNotCovered,
    JumpTooLarge,
    NeighborhoodMeetsQ,
    NeighborhoodOverlap,
    NoConvergence,
    NoExpansionFound,
    NotInvariant,
    NotMarkov,
    NotMonotone,
    QMeetsJumps,
    SymmetryViolation,
    ValidationFailure,
)
from prunedjulia.models import (
    AngleReport,
    ArcReport,
    BoundaryCertificate,
    CircleMapReport,
    MarkovReport,
    SemiconjugacyReport,
)

logger = logging.getLogger(__name__)

Arc = tuple[float, float]


def circular_distance(a, b):
    """Distance between angles on the circle of length one."""
    return np.abs((np.asarray(a) - np.asarray(b) + 0.5) % 1.0 - 0.5)


@dataclass(frozen=True)
class CircleMapE:
    """Degree-d circle map with jump discontinuities, given by its lift."""

    degree: int
    sign: int
    sin: tuple[float, ...] = ()
    cos: tuple[float, ...] = ()
    jumps: tuple[float, ...] = ()
    sizes: tuple[float, ...] = ()
    marked: tuple[float, ...] = ()

    @property
    def offset(self) -> float:
        return 0.0 if self.sign == 1 else 0.5

    def smooth(self, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for k, a in enumerate(self.sin, start=1):
            total = total + a * np.sin(2 * np.pi * k * x)
        for k, b in enumerate(self.cos, start=1):
            total = total + b * np.cos(2 * np.pi * k * x)
        return total

    def smooth_slope(self, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for k, a in enumerate(self.sin, start=1):
            total = total + 2 * np.pi * k * a * np.cos(2 * np.pi * k * x)
        for k, b in enumerate(self.cos, start=1):
            total = total - 2 * np.pi * k * b * np.sin(2 * np.pi * k * x)
        return total

    def sawtooth(self, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for xj, delta in zip(self.jumps, self.sizes):
            total = total + delta * (0.5 - np.mod(x - xj, 1.0))
        return total

    def lift(self, x):
        """g*(x); right-continuous at the jumps."""
        x = np.asarray(x, dtype=float)
        return self.degree * x + self.offset + self.smooth(x) + self.sawtooth(x)

    def slope(self, x):
        """Derivative of the lift away from the jumps."""
        return self.degree + self.smooth_slope(x) - sum(self.sizes)

    def __call__(self, x):
        return np.mod(self.lift(x), 1.0)

    def min_slope(self) -> float:
        grid = np.linspace(0.0, 1.0, settings.circle_grid, endpoint=False)
        return float(np.min(self.slope(grid)))

    def summary(self) -> CircleMapReport:
        """Build the JSON report of this map."""
        return CircleMapReport(
            d=self.degree,
            eps=self.sign,
            jumps=list(self.jumps),
            jump_sizes=list(self.sizes),
            min_slope=self.min_slope(),
            Q_g=list(self.marked),
        )


def _lift_power(g, x, n: int):
    for _ in range(n):
        x = g.lift(x)
    return x


def find_circle_periodic_points(g: CircleMapE, period: int) -> List[float]:
    """
    Points of minimal period ``period``: solutions of g*^p(x) - x in Z.

    Sign changes of g*^p(x) - x - m are bracketed on a grid and refined with
    brentq; brackets that straddle a discontinuity are discarded by their
    residual.

    Returns:
        Sorted angles in [0, 1)
    """
    grid = np.linspace(0.0, 1.0, settings.circle_grid + 1)
    excess = _lift_power(g, grid, period) - grid
    found: List[float] = []
    for m in range(int(np.floor(excess.min())), int(np.ceil(excess.max())) + 1):
        values = excess - m
        for k in np.flatnonzero(values[:-1] * values[1:] <= 0):
            def gap(x, m=m):
                return float(_lift_power(g, x, period)) - x - m

            root = brentq(gap, grid[k], grid[k + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
            if abs(gap(root)) > settings.tol_arc:
                continue
            angle = root % 1.0
            if any(circular_distance(angle, other) < 1e-9 for other in found):
                continue
            divisors = [q for q in range(1, period) if period % q == 0]
            if any(circular_distance(g(_lift_power(g, angle, q - 1)), angle) < 1e-9 for q in divisors):
                continue
            found.append(float(angle))
    return sorted(found)


def _check_symmetry(g: CircleMapE) -> None:
    grid = np.linspace(0.0, 1.0, settings.circle_grid, endpoint=False)
    if g.jumps:
        far = np.min(circular_distance(grid[:, None], np.array(g.jumps)[None, :]), axis=1)
        far = np.minimum(
            far, np.min(circular_distance(-grid[:, None], np.array(g.jumps)[None, :]), axis=1)
        )
        grid = grid[far > 1e-6]
    s_plus = g.lift(grid) - g.degree * grid
    s_minus = g.lift(-grid) + g.degree * grid
    worst = float(np.max(circular_distance(s_plus + s_minus, 0.0)))
    if worst > 1e-9:
        raise SymmetryViolation(f"s(-x) = -s(x) mod 1 fails by {worst:.3g}")
    start = float(g.lift(0.0))
    if circular_distance(start, g.offset) > 1e-9:
        raise SymmetryViolation(f"g*(0) = {start:.6g} is not in Z + {g.offset:g}")


def make_circle_map(spec: dict) -> CircleMapE:
    """
    Build and validate a circle map from its JSON spec.

    The spec holds ``d``, ``eps``, an optional ``s`` object with ``sin`` and
    ``cos`` coefficient lists, ``jumps`` as [angle, size] pairs, and either
    ``Q`` (a list of angles) or ``Q_period`` (all points of that period).

    Raises:
        JumpTooLarge: If a jump size is not in (0, 1)
        NotMonotone: If the lift decreases between jumps
        SymmetryViolation: If the lift is not real symmetric, g*(0) has the
            wrong fractional part, or a jump sits at angle 0
        QMeetsJumps: If Q_g meets the jump set
        NotInvariant: If Q_g is not forward invariant
    """
    d = int(spec.get("d", 0))
    eps = int(spec.get("eps", 1))
    if d < 2:
        raise ValidationFailure(f"Degree {d} is below 2")
    if eps not in (-1, 1):
        raise ValidationFailure(f"Sign {eps} is not +1 or -1")

    series = spec.get("s") or {}
    pairs = sorted((float(angle), float(size)) for angle, size in spec.get("jumps", []))
    for angle, size in pairs:
        if not 0.0 < size < 1.0:
            raise JumpTooLarge(f"Jump at {angle:g} has size {size:g}, outside (0, 1)")
        if circular_distance(angle, 0.0) < settings.tol_arc:
            raise SymmetryViolation("A jump at angle 0 breaks g(1) = eps")
        if not 0.0 < angle < 1.0:
            raise ValidationFailure(f"Jump angle {angle:g} is not in (0, 1)")

    g = CircleMapE(
        degree=d,
        sign=eps,
        sin=tuple(float(a) for a in series.get("sin", [])),
        cos=tuple(float(b) for b in series.get("cos", [])),
        jumps=tuple(angle for angle, _ in pairs),
        sizes=tuple(size for _, size in pairs),
    )
    slope = g.min_slope()
    if slope <= 0:
        raise NotMonotone(f"Lift slope drops to {slope:.4g}")
    _check_symmetry(g)

    if "Q_period" in spec:
        marked = find_circle_periodic_points(g, int(spec["Q_period"]))
    else:
        marked = sorted(float(q) % 1.0 for q in spec.get("Q", []))
    for q in marked:
        if g.jumps and np.min(circular_distance(q, np.array(g.jumps))) < settings.tol_arc:
            raise QMeetsJumps(f"Marked angle {q:g} is a jump")
    for q in marked:
        image = float(g(q))
        if marked and min(circular_distance(image, other) for other in marked) > 1e-9:
            raise NotInvariant(f"g({q:.9g}) = {image:.9g} is not in Q_g")
    return CircleMapE(
        degree=g.degree,
        sign=g.sign,
        sin=g.sin,
        cos=g.cos,
        jumps=g.jumps,
        sizes=g.sizes,
        marked=tuple(marked),
    )


@dataclass(frozen=True)
class ContinuousLift:
    """Continuous degree-d covering g_*: g with each jump bridged linearly."""

    base: CircleMapE
    radius: float

    @property
    def degree(self) -> int:
        return self.base.degree

    @property
    def sign(self) -> int:
        return self.base.sign

    def lift(self, x):
        x = np.asarray(x, dtype=float)
        turns = np.floor(x)
        u = x - turns
        values = self.base.lift(x)
        r = self.radius
        for xj in self.base.jumps:
            left, right = xj - r, xj + r
            g_left = float(self.base.lift(left))
            g_right = float(self.base.lift(right))
            bridge = g_left + (g_right - g_left) * (u - left) / (2 * r) + self.degree * turns
            values = np.where((u > left) & (u < right), bridge, values)
        return values

    def __call__(self, x):
        return np.mod(self.lift(x), 1.0)

    def segment_lengths(self) -> List[float]:
        r = self.radius
        return [
            float(self.base.lift(xj + r) - self.base.lift(xj - r)) for xj in self.base.jumps
        ]


def continuous_extension(g: CircleMapE, radius: float) -> ContinuousLift:
    """
    Fill each jump by linear interpolation of the lift across (x_j - r, x_j + r).

    Raises:
        NeighborhoodMeetsQ: If a neighbourhood contains a marked angle
        NeighborhoodOverlap: If neighbourhoods overlap or contain angle 0
        JumpTooLarge: If a bridged segment has image length 1 or more
    """
    if g.jumps and radius <= 0:
        raise NeighborhoodOverlap(f"Radius {radius:g} is not positive")
    for xj in g.jumps:
        if not (0.0 < xj - radius and xj + radius < 1.0):
            raise NeighborhoodOverlap(f"Neighbourhood of {xj:g} contains angle 0")
        for q in g.marked:
            if circular_distance(q, xj) <= radius:
                raise NeighborhoodMeetsQ(f"Marked angle {q:g} lies within {radius:g} of jump {xj:g}")
    for first, second in zip(g.jumps, g.jumps[1:]):
        if second - first <= 2 * radius:
            raise NeighborhoodOverlap(f"Neighbourhoods of {first:g} and {second:g} overlap")
    extension = ContinuousLift(base=g, radius=radius)
    for xj, length in zip(g.jumps, extension.segment_lengths()):
        if length >= 1.0:
            raise JumpTooLarge(f"Bridge over {xj:g} has image length {length:.4g}")
    return extension


def extension_radius(g: CircleMapE) -> float:
    """Largest admissible radius up to default_extension_radius: half the gap to Q, 0 and the next jump."""
    gaps = [settings.default_extension_radius]
    for k, xj in enumerate(g.jumps):
        gaps.extend(0.5 * float(circular_distance(xj, q)) for q in (0.0, *g.marked))
        gaps.extend(0.25 * float(circular_distance(xj, other)) for other in g.jumps[k + 1 :])
    return min(gaps)


@dataclass(frozen=True, eq=False)
class Semiconjugacy:
    """
    Monotone degree-one h with h o g_* = L o h, where L(y) = d y + c.

    ``h(x) = L^{-n}(g_*^n(x))`` at the converged depth n; ``values`` holds h
    on the grid ``grid``.
    """

    extension: object
    depth: int
    grid: np.ndarray
    values: np.ndarray
    residual: float
    monotone: bool

    @property
    def degree(self) -> int:
        return self.extension.degree

    @property
    def shift(self) -> float:
        return 0.0 if self.extension.sign == 1 else 0.5

    def linear(self, y):
        return self.degree * np.asarray(y) + self.shift

    def __call__(self, x, depth: Optional[int] = None):
        n = self.depth if depth is None else depth
        return _pullback_limit(self.extension, np.asarray(x, dtype=float), n, self.shift)


def _pullback_limit(extension, x: np.ndarray, n: int, shift: float):
    d = extension.degree
    y = _lift_power(extension, x, n)
    return (y - shift * (d**n - 1) / (d - 1)) / d**n


def semiconjugacy(extension, sign: Optional[int] = None) -> Semiconjugacy:
    """
    Semi-conjugacy from a continuous covering to z -> eps z^d.

    Args:
        extension: Continuous degree-d lift, e.g. from ``continuous_extension``
            or a jump-free ``CircleMapE``
        sign: Sign eps of the model, defaults to the extension's sign

    Returns:
        h with h(0) = 0 and h(x + 1) = h(x) + 1

    Raises:
        NoConvergence: If the limit does not settle within the depth guard
    """
    sign = extension.sign if sign is None else sign
    shift = 0.0 if sign == 1 else 0.5
    d = extension.degree
    grid = np.linspace(0.0, 1.0, settings.semiconj_grid, endpoint=False)
    guard = min(settings.semiconj_max_depth, int(700 / math.log(d)))

    y = grid.copy()
    previous = grid.copy()
    depth = None
    for n in range(1, guard + 1):
        y = extension.lift(y)
        current = (y - shift * (d**n - 1) / (d - 1)) / d**n
        change = float(np.max(np.abs(current - previous)))
        previous = current
        if change < settings.tol_semiconj:
            depth = n
            break
    if depth is None:
        raise NoConvergence(f"Semi-conjugacy did not settle within {guard} iterations")

    values = previous
    images = _pullback_limit(extension, extension.lift(grid), depth, shift)
    residual = float(np.max(circular_distance(images, d * values + shift)))
    monotone = bool(np.all(np.diff(values) >= -1e-12))
    logger.debug("semi-conjugacy: depth %d, residual %.3g", depth, residual)
    return Semiconjugacy(
        extension=extension,
        depth=depth,
        grid=grid,
        values=values,
        residual=residual,
        monotone=monotone,
    )


def semiconjugacy_summary(h: Semiconjugacy, Q: "PruningSet") -> SemiconjugacyReport:
    return SemiconjugacyReport(
        d=h.degree,
        eps=h.extension.sign,
        depth=h.depth,
        residual=h.residual,
        monotone=h.monotone,
        Q=Q.summary(),
    )


def snap_angle(value: float) -> Optional[Fraction]:
    """Nearest p/q with q <= snap_denominator, if within tol_snap."""
    value = value % 1.0
    exact = Fraction(value).limit_denominator(settings.snap_denominator)
    if abs(float(exact) - value) < settings.tol_snap:
        return exact % 1
    return None


@dataclass(frozen=True)
class PruningSet:
    """Forward-invariant angle set Q of the model map z -> eps z^d."""

    degree: int
    sign: int
    angles: tuple[float, ...]
    exact: tuple[Optional[Fraction], ...]

    def summary(self) -> List[AngleReport]:
        return [
            AngleReport(value=a, exact=None if e is None else f"{e.numerator}/{e.denominator}")
            for a, e in zip(self.angles, self.exact)
        ]

    def equivalent(self, other: "PruningSet") -> bool:
        return pruning_equivalent(
            self.angles, self.degree, self.sign, other.angles, other.degree, other.sign
        )


def pruning_set(g: CircleMapE, h: Semiconjugacy) -> PruningSet:
    """
    Q = h(Q_g), snapped to rationals and checked for invariance under L.

    Raises:
        NotInvariant: If L(Q) is not contained in Q
    """
    raw = sorted({round(float(h(q)) % 1.0, 12) for q in g.marked})
    merged: List[float] = []
    for value in raw:
        if not merged or circular_distance(value, merged[-1]) >= settings.tol_snap:
            merged.append(value)
    if len(merged) > 1 and circular_distance(merged[0], merged[-1]) < settings.tol_snap:
        merged.pop()
    exact = [snap_angle(value) for value in merged]
    angles = [float(e) if e is not None else value for value, e in zip(merged, exact)]

    d, shift = g.degree, Fraction(0) if g.sign == 1 else Fraction(1, 2)
    exact_set = set(exact)
    for value, e in zip(angles, exact):
        if e is not None and None not in exact_set:
            if (d * e + shift) % 1 not in exact_set:
                raise NotInvariant(f"L({e}) = {(d * e + shift) % 1} is not in Q")
            continue
        image = (d * value + float(shift)) % 1.0
        if min(circular_distance(image, other) for other in angles) >= settings.tol_snap:
            raise NotInvariant(f"L({value:.9g}) = {image:.9g} is not in Q")
    order = np.argsort(angles)
    return PruningSet(
        degree=d,
        sign=g.sign,
        angles=tuple(angles[k] for k in order),
        exact=tuple(exact[k] for k in order),
    )


def pruning_equivalent(
    Q1: Sequence[float], d1: int, eps1: int, Q2: Sequence[float], d2: int, eps2: int
) -> bool:
    """Same degree, same sign and the same angle set up to tol_snap."""
    if d1 != d2 or eps1 != eps2 or len(Q1) != len(Q2):
        return False
    first = sorted(float(q) % 1.0 for q in Q1)
    second = sorted(float(q) % 1.0 for q in Q2)
    return all(circular_distance(a, b) < settings.tol_snap for a, b in zip(first, second))


# Arc arithmetic


def _open_pieces(arcs: Iterable[Arc]) -> List[Arc]:
    """Union of open arcs as merged sub-intervals of [0, 1]."""
    pieces = []
    for lo, hi in arcs:
        if hi - lo >= 1.0:
            return [(0.0, 1.0)]
        if hi <= lo:
            continue
        start = lo % 1.0
        end = start + (hi - lo)
        if end <= 1.0:
            pieces.append((start, end))
        else:
            pieces.extend([(start, 1.0), (0.0, end - 1.0)])
    pieces.sort()
    merged: List[list] = []
    for lo, hi in pieces:
        if merged and lo <= merged[-1][1] + settings.tol_arc:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def _complement(pieces: List[Arc]) -> List[Arc]:
    """Closed arcs of the circle not covered by the open pieces."""
    if not pieces:
        return [(0.0, 1.0)]
    gaps = []
    cursor = 0.0
    for lo, hi in pieces:
        if lo - cursor > settings.tol_arc:
            gaps.append([cursor, lo])
        cursor = max(cursor, hi)
    if 1.0 - cursor > settings.tol_arc:
        gaps.append([cursor, 1.0])
    if len(gaps) > 1 and gaps[0][0] == 0.0 and gaps[-1][1] == 1.0:
        first = gaps.pop(0)
        gaps[-1][1] = 1.0 + first[1]
    elif len(gaps) == 1 and gaps[0] == [0.0, 1.0]:
        return [(0.0, 1.0)]
    return [(lo % 1.0 if lo < 1.0 else lo - 1.0, hi if lo < 1.0 else hi - 1.0) for lo, hi in gaps]


def _branches(g: CircleMapE) -> List[tuple[float, float, float, float]]:
    """Continuity branches (u, v, g*(u), g*(v-)) covering one period."""
    if not g.jumps:
        return [(0.0, 1.0, float(g.lift(0.0)), float(g.lift(1.0)))]
    cuts = list(g.jumps) + [g.jumps[0] + 1.0]
    branches = []
    for u, v in zip(cuts, cuts[1:]):
        k = cuts.index(v) % len(g.jumps)
        top = float(g.lift(v)) - g.sizes[k]
        branches.append((u, v, float(g.lift(u)), top))
    return branches


def _preimage(g: CircleMapE, pieces: List[Arc]) -> List[Arc]:
    """g^{-1} of a union of open sub-intervals of [0, 1], branch by branch."""
    result = []
    for u, v, bottom, top in _branches(g):
        def branch(x, u=u, v=v, top=top):
            return top if x >= v else float(g.lift(x))

        for a, b in pieces:
            for m in range(math.ceil(bottom - b), math.floor(top - a) + 1):
                lo_t, hi_t = max(a + m, bottom), min(b + m, top)
                if hi_t <= lo_t:
                    continue
                x_lo = u if lo_t <= bottom else brentq(lambda x: branch(x) - lo_t, u, v, xtol=1e-15)
                x_hi = v if hi_t >= top else brentq(lambda x: branch(x) - hi_t, u, v, xtol=1e-15)
                result.append((x_lo, x_hi))
    return result


def _removed(g: CircleMapE, seeds: List[Arc], N: int) -> List[Arc]:
    """Open set of angles whose orbit meets the seed arcs within N steps."""
    base = _open_pieces(seeds)
    removed = base
    for _ in range(N):
        removed = _open_pieces(base + _preimage(g, removed))
    return removed


def _check_arcs(g: CircleMapE, Y: Sequence[Arc], B0: Sequence[Arc]) -> None:
    for lo, hi in list(Y) + list(B0):
        for end in (lo, hi):
            if g.jumps and np.min(circular_distance(end, np.array(g.jumps))) < settings.tol_arc:
                raise EndpointOnJump(f"Arc endpoint {end:g} is a jump")
    covered = _open_pieces(Y)
    for xj in g.jumps:
        if not any(lo < xj < hi or lo < xj + 1.0 < hi for lo, hi in covered):
            raise JumpsNotCovered(f"Jump {xj:g} is not inside an arc of Y")


@dataclass(frozen=True)
class LambdaSets:
    """Lambda_N and Lambda'_N as closed arcs."""

    N: int
    lambda_N: tuple[Arc, ...]
    lambda_prime_N: tuple[Arc, ...]


def lambda_sets(
    g: CircleMapE, Y: Sequence[Arc], B0: Sequence[Arc] = (), N: int = 1
) -> LambdaSets:
    """
    Angles whose first N + 1 iterates avoid Y (Lambda_N) or Y and B0 (Lambda'_N).

    Raises:
        EndpointOnJump: If an arc endpoint is a jump
        JumpsNotCovered: If Y misses a jump
    """
    _check_arcs(g, Y, B0)
    plain = _complement(_removed(g, list(Y), N))
    primed = _complement(_removed(g, list(Y) + list(B0), N))
    return LambdaSets(N=N, lambda_N=tuple(plain), lambda_prime_N=tuple(primed))


def arcs_contain(arcs: Sequence[Arc], x) -> np.ndarray:
    """Membership of angles in a union of closed arcs."""
    x = np.mod(np.asarray(x, dtype=float), 1.0)
    inside = np.zeros(x.shape, dtype=bool)
    for lo, hi in arcs:
        inside |= ((x >= lo) & (x <= hi)) | ((x + 1.0 >= lo) & (x + 1.0 <= hi))
    return inside


def eventual_period(g: CircleMapE, x: float, bound: Optional[int] = None) -> Optional[tuple[int, int]]:
    """(preperiod, period) of an angle, or None if none exists within the bound."""
    bound = settings.max_preperiod if bound is None else bound
    orbit = [float(x) % 1.0]
    for k in range(1, bound + 1):
        y = float(g(orbit[-1]))
        for pre, earlier in enumerate(orbit):
            if circular_distance(earlier, y) < settings.tol_markov:
                return pre, k - pre
        orbit.append(y)
    return None


def _expansion(g: CircleMapE, arcs: Sequence[Arc]) -> tuple[int, float]:
    lengths = np.array([hi - lo for lo, hi in arcs])
    counts = np.maximum(1, np.round(settings.expansion_samples * lengths / lengths.sum())).astype(int)
    samples = np.concatenate(
        [np.linspace(lo, hi, count + 2)[1:-1] for (lo, hi), count in zip(arcs, counts)]
    )
    x = samples.copy()
    derivative = np.ones_like(samples)
    for n in range(1, settings.max_expansion_iterate + 1):
        derivative = derivative * g.slope(x)
        x = g(x)
        smallest = float(np.min(np.abs(derivative)))
        if smallest > settings.expansion_threshold:
            return n, smallest
    raise NoExpansionFound(
        f"No iterate up to {settings.max_expansion_iterate} expands by {settings.expansion_threshold:g}"
    )


@dataclass(frozen=True)
class MarkovStructure:
    """Ranges I'_j, domains I_i with g(I_i) = I'_{j(i)}, and an expansion pair."""

    N: int
    lambda_N: tuple[Arc, ...]
    ranges: tuple[Arc, ...]
    domains: tuple[Arc, ...]
    transitions: tuple[int, ...]
    expansion_iterate: int
    expansion_constant: float
    certificates: tuple[tuple[float, int, int], ...]

    def summary(self) -> MarkovReport:
        """Build the JSON report of this structure."""
        return MarkovReport(
            N=self.N,
            lambda_N=[ArcReport(lo=lo, hi=hi) for lo, hi in self.lambda_N],
            lambda_prime_N=[ArcReport(lo=lo, hi=hi) for lo, hi in self.ranges],
            domains=[ArcReport(lo=lo, hi=hi) for lo, hi in self.domains],
            transitions=list(self.transitions),
            expansion_iterate=self.expansion_iterate,
            expansion_constant=self.expansion_constant,
            certificates=[
                BoundaryCertificate(angle=a, preperiod=pre, period=per)
                for a, pre, per in self.certificates
            ],
        )


def markov_structure(
    g: CircleMapE, Y: Sequence[Arc], B0: Sequence[Arc] = (), N: int = 1
) -> MarkovStructure:
    """
    Expanding Markov structure on Lambda'_N.

    The ranges I'_j are the components of Lambda'_N and the domains I_i the
    components of Lambda'_{N+1}; each domain must map onto one range.

    Raises:
        BoundaryNotEventuallyPeriodic: If a boundary point of Y or B0 is not
            eventually periodic within the preperiod bound
        NotMarkov: If a domain is not mapped onto a range
        NoExpansionFound: If no iterate expands uniformly on the samples
    """
    certificates = []
    for lo, hi in list(Y) + list(B0):
        for end in (lo % 1.0, hi % 1.0):
            found = eventual_period(g, end)
            if found is None:
                raise BoundaryNotEventuallyPeriodic(
                    f"Boundary angle {end:.9g} is not eventually periodic within {settings.max_preperiod}"
                )
            certificates.append((end, found[0], found[1]))

    current = lambda_sets(g, Y, B0, N)
    deeper = lambda_sets(g, Y, B0, N + 1)
    ranges = current.lambda_prime_N
    domains = deeper.lambda_prime_N

    transitions = []
    for lo, hi in domains:
        image_lo = float(g.lift(lo))
        image_hi = float(g.lift(hi))
        match = None
        for j, (r_lo, r_hi) in enumerate(ranges):
            if (
                circular_distance(image_lo, r_lo) < settings.tol_markov
                and abs((image_hi - image_lo) - (r_hi - r_lo)) < settings.tol_markov
            ):
                match = j
                break
        if match is None:
            raise NotMarkov(f"g([{lo:.9g}, {hi:.9g}]) is not one of the ranges")
        transitions.append(match)

    iterate_n, constant = _expansion(g, ranges)
    logger.debug(
        "markov: %d ranges, %d domains, expansion %.4g at N'=%d",
        len(ranges),
        len(domains),
        constant,
        iterate_n,
    )
    return MarkovStructure(
        N=N,
        lambda_N=current.lambda_N,
        ranges=ranges,
        domains=domains,
        transitions=tuple(transitions),
        expansion_iterate=iterate_n,
        expansion_constant=constant,
        certificates=tuple(sorted(set(certificates))),
    )
