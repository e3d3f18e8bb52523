"""
Pruned Julia sets as finite trees of preimage arcs.

K_0 is the interval I = [-1, 1]. K_1 adds the non-real arcs of f^{-1}(J)
attached at the critical points, and K_{n+1} adds the lifts of the
generation-n arcs whose attachment point lies on K_n and is not a periodic
critical point. Arcs are sampled polylines obtained by Newton continuation
of inverse branches; "lies on K_n" is decided up to five sampling steps.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.spatial import cKDTree
from scipy.spatial.distance import directed_hausdorff

from prunedjulia.config import settings
from prunedjulia.exceptions import (
    ArcEscape,
    BasinTooLarge,
    BranchAmbiguity,
    IntervalConstraint,
    TreeTooLarge,
)
from prunedjulia.models import (
    BasinReport,
    CheckReport,
    CheckResult,
    CriticalClassification,
    PeriodicOrbitRecord,
    TreeGenerationReport,
    TreeReport,
)
from prunedjulia.orbits import basin_enclosure, find_periodic_orbits, periodic_critical_points
from prunedjulia.polymap import CriticalPoint, IntervalMap, iterate
from prunedjulia.utils import complex_pairs, parallel_map

logger = logging.getLogger(__name__)

Predictor = Callable[[complex, complex, complex], complex]

_PREDICTOR_RATIO = 0.5
_MAX_NEWTON = 50
_ANGLE_EPS = 1e-9
_MAX_PREIMAGES = 4096


@dataclass(frozen=True, eq=False)
class Arc:
    """A sampled non-real arc, running from its attachment point to its tip."""

    id: int
    generation: int
    points: np.ndarray
    parent: Optional[int]  # arc this one is a lift of
    host: Optional[int]  # arc carrying the attachment point, None for I
    anchor: int  # critical point the lift chain starts at

    @property
    def attachment(self) -> complex:
        return complex(self.points[0])

    @property
    def tip(self) -> complex:
        return complex(self.points[-1])

    @property
    def upper(self) -> bool:
        return bool(self.points[len(self.points) // 2].imag > 0)

    @property
    def step(self) -> float:
        return float(np.max(np.abs(np.diff(self.points))))

    @property
    def length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.points))))


@dataclass(frozen=True, eq=False)
class PruningData:
    """
    Pruning intervals and the arcs J^{-1} attached to the critical points.

    ``violations`` lists the failures of the basin condition on J; a non-empty
    list sets the "violates condition (3)" flag.
    """

    intervals: tuple[tuple[float, float], ...]
    arcs: tuple[Arc, ...]
    inner: Optional[tuple[tuple[float, float], ...]] = None
    flags: tuple[str, ...] = ()
    violations: tuple[str, ...] = ()

    @property
    def endpoints(self) -> np.ndarray:
        """The pruning points X, one tip per arc."""
        return np.array([arc.tip for arc in self.arcs], dtype=complex)

    @property
    def anchors(self) -> List[int]:
        return [arc.anchor for arc in self.arcs]

    @property
    def boundary_values(self) -> np.ndarray:
        return np.array([x for interval in self.intervals for x in interval])


@dataclass(frozen=True)
class BasinCover:
    """Real trapping interval of an attracting point, covered by a round disc."""

    attractor: int
    point: float
    lo: float
    hi: float

    @property
    def centre(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def radius(self) -> float:
        return 0.5 * (self.hi - self.lo)


@dataclass(frozen=True, eq=False)
class PrunedTree:
    """
    The trees K_0 in K_1 in ... in K_N.

    ``generations[n]`` holds the arcs added in K_n; ``generations[0]`` is
    empty since K_0 is the interval itself.
    """

    data: PruningData
    generations: tuple[tuple[Arc, ...], ...]
    excluded: tuple[float, ...]
    domain_halfwidth: float
    partner: Dict[int, int]
    basins: tuple[BasinCover, ...] = ()
    small_basins: Optional[bool] = None

    @property
    def depth(self) -> int:
        return len(self.generations) - 1

    def arcs(self, n: Optional[int] = None) -> List[Arc]:
        """Arcs of K_n, all arcs when n is None."""
        n = self.depth if n is None else n
        return [arc for generation in self.generations[1 : n + 1] for arc in generation]

    def arc_counts(self) -> List[int]:
        """Cumulative number of arcs in K_0, ..., K_N."""
        counts = [0]
        for generation in self.generations[1:]:
            counts.append(counts[-1] + len(generation))
        return counts

    def by_id(self) -> Dict[int, Arc]:
        return {arc.id: arc for arc in self.arcs()}

    def sampling_step(self) -> float:
        arcs = self.arcs()
        return max((arc.step for arc in arcs), default=0.0)

    def summary(self) -> TreeReport:
        """Build the JSON report of this tree."""
        return TreeReport(
            intervals=[list(interval) for interval in self.data.intervals],
            generations=[
                TreeGenerationReport(
                    n=n,
                    arc_count=len(generation),
                    endpoints=complex_pairs([arc.tip for arc in generation]),
                )
                for n, generation in enumerate(self.generations)
            ],
            total_arcs=self.arc_counts()[-1],
            excluded_periodic_critical=list(self.excluded),
            flags=list(self.data.flags),
            basins=[
                BasinReport(
                    attractor=cover.attractor,
                    point=cover.point,
                    lo=cover.lo,
                    hi=cover.hi,
                    radius=cover.radius,
                )
                for cover in self.basins
            ],
            small_basins=self.small_basins,
        )


# Inverse-branch continuation


def _newton(poly: Polynomial, slope: Polynomial, z: complex, w: complex) -> Optional[complex]:
    for _ in range(_MAX_NEWTON):
        d = slope(z)
        if d == 0:
            return None
        step = (poly(z) - w) / d
        z = z - step
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            break
    if not np.isfinite(z) or abs(poly(z) - w) > settings.tol_branch * max(1.0, abs(w)):
        return None
    return complex(z)


def _euler_predictor(slope: Polynomial) -> Predictor:
    def predict(z: complex, w0: complex, w1: complex) -> complex:
        d = slope(z)
        if d == 0:
            return z
        return z + (w1 - w0) / d

    return predict


def _branch_predictor(
    slope: Polynomial, crit: CriticalPoint, kappa: float, value: float, branch: int
) -> Predictor:
    """Predictor for the branch-th local inverse leaving a critical point."""
    euler = _euler_predictor(slope)
    c, order = crit.position, crit.order

    def predict(z: complex, w0: complex, w1: complex) -> complex:
        if z != c:
            return euler(z, w0, w1)
        u = (w1 - value) / kappa
        angle = (np.angle(u) + 2.0 * np.pi * branch) / order
        return c + abs(u) ** (1.0 / order) * np.exp(1j * angle)

    return predict


def _advance(
    poly: Polynomial,
    slope: Polynomial,
    z: complex,
    w0: complex,
    w1: complex,
    predict: Predictor,
    floor: float,
) -> complex:
    """Move a preimage z of w0 to the preimage of w1 on the same branch."""
    if w1 == w0:
        return z
    guess = predict(z, w0, w1)
    candidate = _newton(poly, slope, guess, w1)
    if candidate is not None and abs(candidate - guess) <= _PREDICTOR_RATIO * abs(guess - z):
        return candidate
    if abs(w1 - w0) < floor:
        raise BranchAmbiguity(
            f"Inverse branch lost near z = {z:.6g} after halving to {abs(w1 - w0):.3g}"
        )
    mid = 0.5 * (w0 + w1)
    z_mid = _advance(poly, slope, z, w0, mid, predict, floor)
    return _advance(poly, slope, z_mid, mid, w1, predict, floor)


def _track(f: IntervalMap, targets: np.ndarray, start: complex, predict: Predictor) -> np.ndarray:
    """Lift the polyline ``targets`` through f starting from ``start``."""
    poly = f.polynomial
    slope = f.derivative_polynomial(1)
    span = float(np.max(np.abs(targets - targets[0])))
    floor = settings.min_branch_step * max(span, 1e-300)
    points = np.empty(len(targets), dtype=complex)
    points[0] = z = complex(start)
    for k in range(1, len(targets)):
        z = _advance(poly, slope, z, complex(targets[k - 1]), complex(targets[k]), predict, floor)
        points[k] = z

    steps = np.abs(np.diff(points))
    limit = 2.0 * float(np.median(steps))
    coarse = set(np.flatnonzero(steps > limit).tolist()) if limit > 0 else set()
    if not coarse:
        return points
    # one refinement pass where the lift stretches, i.e. where |f'| is small
    refined = [points[0]]
    for k in range(len(steps)):
        if k in coarse:
            mid = 0.5 * (targets[k] + targets[k + 1])
            refined.append(
                _advance(poly, slope, points[k], complex(targets[k]), complex(mid), predict, floor)
            )
        refined.append(points[k + 1])
    logger.debug("refined %d coarse segments", len(coarse))
    return np.array(refined)


def _strip_distance(points: np.ndarray) -> np.ndarray:
    return np.abs(points - np.clip(points.real, -1.0, 1.0))


def _check_strip(points: np.ndarray, a: float, what: str) -> None:
    worst = float(np.max(_strip_distance(points)))
    if worst >= a:
        raise ArcEscape(f"{what} reaches distance {worst:.4g} from I, outside a = {a:g}")


def _sealed(points: np.ndarray) -> np.ndarray:
    points = np.array(points, dtype=complex)
    points.setflags(write=False)
    return points


# Pruning data


def _validate_intervals(
    f: IntervalMap, J: Sequence[Sequence[float]]
) -> tuple[List[tuple[float, float]], List[List[int]]]:
    intervals = sorted((float(lo), float(hi)) for lo, hi in J)
    if not intervals:
        raise IntervalConstraint("No pruning intervals given")
    for lo, hi in intervals:
        if not lo < hi:
            raise IntervalConstraint(f"Pruning interval ({lo:g}, {hi:g}) is empty")
        if not (-1.0 < lo and hi < 1.0):
            raise IntervalConstraint(
                f"Pruning interval ({lo:g}, {hi:g}) is not compactly inside (-1, 1)"
            )
    for (lo1, hi1), (lo2, hi2) in zip(intervals, intervals[1:]):
        if hi1 >= lo2:
            raise IntervalConstraint(f"Pruning intervals ({lo1:g}, {hi1:g}) and ({lo2:g}, {hi2:g}) overlap")

    members: List[List[int]] = [[] for _ in intervals]
    values = f.critical_values()
    for index, value in enumerate(values):
        if abs(value) >= 1.0 - settings.tol_boundary:
            raise IntervalConstraint(
                f"Critical value {value:.6g} of c_{index} lies on the boundary of I"
            )
        hits = [k for k, (lo, hi) in enumerate(intervals) if lo < value < hi]
        if not hits:
            raise IntervalConstraint(
                f"Critical value {value:.6g} of c_{index} is not inside a pruning interval"
            )
        members[hits[0]].append(index)

    for k, indices in enumerate(members):
        if not indices:
            lo, hi = intervals[k]
            raise IntervalConstraint(f"Pruning interval ({lo:g}, {hi:g}) contains no critical value")
        distinct = sorted({round(values[i] / settings.tol_hit) for i in indices})
        if len(distinct) > 1:
            lo, hi = intervals[k]
            raise IntervalConstraint(
                f"Pruning interval ({lo:g}, {hi:g}) contains {len(distinct)} critical values"
            )
    return intervals, members


def _critical_arcs(f: IntervalMap, index: int, interval: tuple[float, float]) -> List[np.ndarray]:
    """Upper-half-plane arcs of f^{-1}(J_i) attached at one critical point."""
    crit = f.critical_points[index]
    c, order = crit.position, crit.order
    kappa = float(f.derivative(c, order)) / math.factorial(order)
    value = float(f(c))
    slope = f.derivative_polynomial(1)
    sigma = np.linspace(0.0, 1.0, settings.arc_samples)

    arcs = []
    for end in interval:
        span = end - value
        # w = f(c) + span * sigma^l keeps the samples evenly spaced in z
        targets = (value + span * sigma**order).astype(complex)
        base = float(np.angle(span / kappa))
        for branch in range(order):
            angle = (base + 2.0 * np.pi * branch) / order
            if not _ANGLE_EPS < angle < np.pi - _ANGLE_EPS:
                continue
            predict = _branch_predictor(slope, crit, kappa, value, branch)
            arcs.append((angle, _track(f, targets, c, predict)))
    return [points for _, points in sorted(arcs, key=lambda item: item[0])]


def _real_preimages(f: IntervalMap, level: Sequence[float]) -> List[float]:
    found = set()
    for y in level:
        for root in (f.polynomial - y).roots():
            if abs(root.imag) <= settings.tol_attach and -1.0 <= root.real <= 1.0:
                found.add(round(float(root.real), 12))
    return sorted(found)[:_MAX_PREIMAGES]


def _attractor_of(f: IntervalMap, x, attracting: Sequence[PeriodicOrbitRecord]) -> np.ndarray:
    """Index of the attractor each point converges to, -1 if none."""
    end = iterate(f, np.atleast_1d(np.asarray(x, dtype=float)), settings.default_horizon)
    result = np.full(end.shape, -1)
    for k, orbit in enumerate(attracting):
        close = np.min(np.abs(end[:, None] - np.asarray(orbit.points)[None, :]), axis=1)
        result[(result < 0) & (close < settings.tol_attract)] = k
    return result


def backward_orbit_violations(
    f: IntervalMap,
    J: Sequence[Sequence[float]],
    depth: Optional[int] = None,
    orbits: Optional[List[PeriodicOrbitRecord]] = None,
) -> List[str]:
    """
    Check the basin condition on pruning intervals.

    A J_i whose critical value is attracted to a periodic attractor must lie
    compactly in the basin of that attractor and must not contain a point of
    the backward orbit of a non-periodic critical point.

    Args:
        f: Interval map
        J: Pruning intervals
        depth: Number of backward steps searched
        orbits: Periodic orbits of f, computed when omitted

    Returns:
        One message per violation, empty when the condition holds
    """
    depth = settings.backward_depth if depth is None else depth
    if orbits is None:
        orbits = find_periodic_orbits(f, settings.default_max_period)
    attracting = [o for o in orbits if o.stability in ("Attracting", "SuperAttracting")]
    periodic = set(periodic_critical_points(f))

    backward = []
    for index, c in enumerate(f.positions):
        if index in periodic:
            continue
        level = [c]
        for k in range(depth + 1):
            backward.extend((index, k, x) for x in level)
            if k < depth:
                level = _real_preimages(f, level)

    messages = []
    values = f.critical_values()
    for i, (lo, hi) in enumerate(J):
        inside = [v for v in values if lo < v < hi]
        if not inside or not attracting:
            continue
        target = int(_attractor_of(f, inside[0], attracting)[0])
        if target < 0:
            continue
        grid = np.linspace(lo, hi, 129)
        if np.any(_attractor_of(f, grid, attracting) != target):
            messages.append(
                f"J_{i} = ({lo:g}, {hi:g}) is not inside the basin of the attractor "
                f"through {attracting[target].points[0]:.6g}"
            )
        for index, k, x in backward:
            if lo <= x <= hi:
                messages.append(f"J_{i} = ({lo:g}, {hi:g}) contains {x:.6g} = f^-{k}(c_{index})")
    return messages


def build_pruning_data(
    f: IntervalMap,
    J: Sequence[Sequence[float]],
    inner: Optional[Sequence[Sequence[float]]] = None,
    check_basin: bool = True,
) -> PruningData:
    """
    Validate pruning intervals and compute the arcs J^{-1} at the critical points.

    Args:
        f: Interval map
        J: Pruning intervals, one around each critical value
        inner: Optional intervals J*_i compactly inside the J_i
        check_basin: Run ``backward_orbit_violations`` and flag failures

    Returns:
        Pruning data with 2(l - 1) arcs per critical point, in conjugate pairs

    Raises:
        IntervalConstraint: If the intervals overlap, leave (-1, 1), miss a
            critical value or hold two distinct ones
        ArcEscape: If an arc leaves the strip of half-width a
    """
    intervals, members = _validate_intervals(f, J)
    inner_intervals = None
    if inner is not None:
        inner_intervals = tuple(sorted((float(lo), float(hi)) for lo, hi in inner))
        if len(inner_intervals) != len(intervals) or any(
            not (lo < ilo < ihi < hi)
            for (lo, hi), (ilo, ihi) in zip(intervals, inner_intervals)
        ):
            raise IntervalConstraint("Inner intervals must lie compactly inside the pruning intervals")

    arcs: List[Arc] = []
    for k, indices in enumerate(members):
        for index in indices:
            for points in _critical_arcs(f, index, intervals[k]):
                _check_strip(points, f.domain_halfwidth, f"Arc at c_{index}")
                for sheet in (points, np.conj(points)):
                    arcs.append(
                        Arc(
                            id=len(arcs),
                            generation=1,
                            points=_sealed(sheet),
                            parent=None,
                            host=None,
                            anchor=index,
                        )
                    )

    violations = backward_orbit_violations(f, intervals) if check_basin else []
    for message in violations:
        logger.warning("pruning interval: %s", message)
    return PruningData(
        intervals=tuple(intervals),
        arcs=tuple(arcs),
        inner=inner_intervals,
        flags=("violates condition (3)",) if violations else (),
        violations=tuple(violations),
    )


# Tree growth


class _TreeIndex:
    """Nearest-sample lookup over the arcs of one tree K_n."""

    def __init__(self, arcs: Sequence[Arc]):
        self.arcs = list(arcs)
        self.step = max((arc.step for arc in self.arcs), default=0.0)
        if self.arcs:
            points = np.concatenate([arc.points for arc in self.arcs])
            self.owner = np.concatenate([np.full(len(arc.points), arc.id) for arc in self.arcs])
            self.kdtree = cKDTree(np.column_stack([points.real, points.imag]))
        else:
            self.owner = np.empty(0, dtype=int)
            self.kdtree = None

    @property
    def tolerance(self) -> float:
        return 5.0 * self.step

    def distance(self, z) -> np.ndarray:
        """Distance of points to I union the sampled arcs."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        dist = _strip_distance(z)
        if self.kdtree is not None:
            near, _ = self.kdtree.query(np.column_stack([z.real, z.imag]))
            dist = np.minimum(dist, near)
        return dist

    def host_of(self, z: complex) -> tuple[bool, Optional[int]]:
        """Whether z lies on the tree, and the arc carrying it (None for I)."""
        if abs(z.imag) <= settings.tol_attach and abs(z.real) <= 1.0 + settings.tol_attach:
            return True, None
        if self.kdtree is None:
            return False, None
        dist, k = self.kdtree.query([z.real, z.imag])
        if dist <= self.tolerance:
            return True, int(self.owner[k])
        return False, None


def _attachment_roots(f: IntervalMap, q: complex) -> List[tuple[complex, Optional[CriticalPoint]]]:
    """Preimages of q, with roots at a critical point merged and marked."""
    poly = f.polynomial
    slope = f.derivative_polynomial(1)
    roots = sorted((f.polynomial - q).roots(), key=lambda r: (round(r.real, 9), round(r.imag, 9)))
    result = []
    seen = set()
    for z in roots:
        crit = next(
            (
                cp
                for cp in f.critical_points
                if abs(z - cp.position) < 1e-6
                and abs(f(cp.position) - q) <= settings.tol_endpoint * max(1.0, abs(q))
            ),
            None,
        )
        if crit is not None:
            if crit.position not in seen:
                seen.add(crit.position)
                result.append((complex(crit.position), crit))
            continue
        if abs(z.imag) <= settings.tol_attach and q.imag == 0:
            z = complex(z.real)
        polished = _newton(poly, slope, complex(z), q)
        result.append((complex(z) if polished is None else polished, None))
    return result


def _lift_arc(
    f: IntervalMap, arc: Arc, index: _TreeIndex, excluded: Sequence[float]
) -> List[tuple[np.ndarray, Optional[int]]]:
    """Lifts of one arc that attach to the tree away from Cr'(f)."""
    slope = f.derivative_polynomial(1)
    lifts = []
    for z, crit in _attachment_roots(f, arc.attachment):
        if any(abs(z - e) <= settings.tol_attach for e in excluded):
            continue
        attached, host = index.host_of(z)
        if not attached:
            continue
        if crit is None:
            predictors = [_euler_predictor(slope)]
        else:
            kappa = float(f.derivative(crit.position, crit.order)) / math.factorial(crit.order)
            value = float(f(crit.position))
            predictors = [
                _branch_predictor(slope, crit, kappa, value, branch)
                for branch in range(crit.order)
            ]
        for predict in predictors:
            lifts.append((_track(f, arc.points, z, predict), host))
    return lifts


def grow_pruned_tree(
    f: IntervalMap, data: PruningData, N: int, threads: Optional[int] = None
) -> PrunedTree:
    """
    Grow K_0, ..., K_N from the pruning data.

    Args:
        f: Interval map
        data: Pruning data from ``build_pruning_data``
        N: Depth
        threads: Worker count for the per-arc lifts

    Returns:
        The tree with N + 1 generations

    Raises:
        TreeTooLarge: If N or the arc count exceeds its guard
        ArcEscape: If a lifted arc leaves the strip
        BranchAmbiguity: If continuation cannot stay on one inverse branch
    """
    if not 0 <= N <= settings.max_depth:
        raise TreeTooLarge(f"Depth {N} is outside 0..{settings.max_depth}")
    excluded = tuple(f.positions[i] for i in periodic_critical_points(f))
    a = f.domain_halfwidth

    generations: List[tuple[Arc, ...]] = [()]
    partner: Dict[int, int] = {}
    if N >= 1:
        generations.append(data.arcs)
        for upper, lower in zip(data.arcs[::2], data.arcs[1::2]):
            partner[upper.id] = lower.id
            partner[lower.id] = upper.id
    next_id = len(data.arcs)
    total = len(data.arcs)

    for n in range(1, N):
        index = _TreeIndex([arc for generation in generations[1:] for arc in generation])
        parents = [arc for arc in generations[n] if arc.upper]
        lifted = parallel_map(lambda arc: _lift_arc(f, arc, index, excluded), parents, threads)

        new_arcs: List[Arc] = []
        for parent, lifts in zip(parents, lifted):
            for points, host in lifts:
                _check_strip(points, a, f"Generation {n + 1} arc")
                upper = Arc(
                    id=next_id,
                    generation=n + 1,
                    points=_sealed(points),
                    parent=parent.id,
                    host=host,
                    anchor=parent.anchor,
                )
                lower = Arc(
                    id=next_id + 1,
                    generation=n + 1,
                    points=_sealed(np.conj(points)),
                    parent=partner[parent.id],
                    host=None if host is None else partner.get(host, host),
                    anchor=parent.anchor,
                )
                partner[upper.id] = lower.id
                partner[lower.id] = upper.id
                new_arcs.extend((upper, lower))
                next_id += 2

        total += len(new_arcs)
        if total > settings.max_arcs:
            raise TreeTooLarge(f"K_{n + 1} has {total} arcs, more than {settings.max_arcs}")
        logger.debug("generation %d: %d arcs (total %d)", n + 1, len(new_arcs), total)
        generations.append(tuple(new_arcs))

    return PrunedTree(
        data=data,
        generations=tuple(generations),
        excluded=excluded,
        domain_halfwidth=a,
        partner=partner,
    )


# Invariant checks


def _result(name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), detail=detail)


def _check_monotone(tree: PrunedTree) -> CheckResult:
    ids = [{arc.id for arc in generation} for generation in tree.generations]
    problems = 0
    for n, generation in enumerate(tree.generations):
        for arc in generation:
            if arc.generation != n:
                problems += 1
            elif n == 1 and arc.parent is not None:
                problems += 1
            elif n >= 2 and arc.parent not in ids[n - 1]:
                problems += 1
    counts = tree.arc_counts()
    nested = all(x <= y for x, y in zip(counts, counts[1:]))
    return _result(
        "tree.monotone",
        problems == 0 and nested,
        f"arc counts {counts}, {problems} misplaced arcs",
    )


def _check_symmetry(tree: PrunedTree, tol: float) -> CheckResult:
    arcs = tree.arcs()
    if not arcs:
        return _result("tree.symmetry", True, "no arcs")
    tips = cKDTree(np.array([[arc.tip.real, arc.tip.imag] for arc in arcs]))
    worst = 0.0
    for arc in arcs:
        mirrored = np.column_stack([arc.points.real, -arc.points.imag])
        _, k = tips.query([arc.tip.real, -arc.tip.imag])
        other = arcs[int(k)].points
        theirs = np.column_stack([other.real, other.imag])
        distance = max(directed_hausdorff(mirrored, theirs)[0], directed_hausdorff(theirs, mirrored)[0])
        worst = max(worst, distance)
    return _result("tree.symmetry", worst < tol, f"worst Hausdorff distance {worst:.3g}")


def _check_connected(tree: PrunedTree, tol: float) -> CheckResult:
    arcs = tree.by_id()
    worst = 0.0
    detached = 0
    for arc in arcs.values():
        z = arc.attachment
        if arc.host is None:
            distance = abs(z.imag) if abs(z.real) <= 1.0 + settings.tol_attach else np.inf
        elif arc.host in arcs and arcs[arc.host].generation < arc.generation:
            distance = float(np.min(np.abs(arcs[arc.host].points - z)))
        else:
            detached += 1
            continue
        worst = max(worst, distance)
    passed = detached == 0 and worst <= max(tol, settings.tol_attach)
    return _result("tree.connected", passed, f"worst attachment gap {worst:.3g}, {detached} detached")


def _check_forward(f: IntervalMap, tree: PrunedTree, tol: float) -> CheckResult:
    worst = 0.0
    for n in range(tree.depth):
        fresh = tree.generations[n + 1]
        if not fresh:
            continue
        index = _TreeIndex(tree.arcs(n))
        images = f(np.concatenate([arc.points for arc in fresh]))
        worst = max(worst, float(np.max(index.distance(images))))
    return _result(
        "tree.forward_invariant",
        worst < max(tol, settings.tol_attach),
        f"worst distance of f(K_(n+1)) to K_n {worst:.3g}",
    )


def _check_strip_all(tree: PrunedTree) -> CheckResult:
    arcs = tree.arcs()
    worst = max((float(np.max(_strip_distance(arc.points))) for arc in arcs), default=0.0)
    return _result(
        "tree.strip", worst < tree.domain_halfwidth, f"max distance to I {worst:.4g}"
    )


def _check_endpoints(f: IntervalMap, tree: PrunedTree) -> CheckResult:
    arcs = tree.by_id()
    ends = tree.data.boundary_values
    worst_step = 0.0
    worst_iterate = 0.0
    for arc in arcs.values():
        image = f(arc.tip)
        if arc.parent is None:
            worst_step = max(worst_step, float(np.min(np.abs(image - ends))))
        else:
            worst_step = max(worst_step, abs(image - arcs[arc.parent].tip))
        landing = iterate(f, arc.tip, arc.generation)
        worst_iterate = max(worst_iterate, float(np.min(np.abs(landing - ends))))
    return _result(
        "tree.endpoints",
        worst_step <= settings.tol_endpoint,
        f"worst tip residual {worst_step:.3g}, after iteration onto dJ {worst_iterate:.3g}",
    )


def _check_excluded(tree: PrunedTree) -> CheckResult:
    bad = [
        arc.id
        for arc in tree.arcs()
        if arc.generation >= 2
        and any(abs(arc.attachment - e) <= settings.tol_attach for e in tree.excluded)
    ]
    return _result("tree.excluded", not bad, f"{len(bad)} arcs attached at Cr'(f)")


def check_tree_invariants(f: IntervalMap, tree: PrunedTree) -> CheckReport:
    """
    Run the invariant suite on a pruned tree.

    Checks nesting, conjugation symmetry, connectivity, forward invariance
    f(K_{n+1}) in K_n, the strip bound, tip residuals and the exclusion of
    periodic critical points. Failures are reported, never raised.
    """
    tol = 5.0 * tree.sampling_step()
    checks = [
        _check_monotone(tree),
        _check_symmetry(tree, max(tol, settings.tol_attach)),
        _check_connected(tree, tol),
        _check_forward(f, tree, tol),
        _check_strip_all(tree),
        _check_endpoints(f, tree),
        _check_excluded(tree),
    ]
    return CheckReport(
        target="pruned tree", checks=checks, passed=all(check.passed for check in checks)
    )


def build_KXO(
    f: IntervalMap,
    tree: PrunedTree,
    classification: CriticalClassification,
    horizon: Optional[int] = None,
) -> PrunedTree:
    """
    Attach the real basin enclosures of the attractors to a pruned tree.

    Each enclosure is covered by the round disc over it; the small-basins test
    asks every disc to stay inside the strip.

    Args:
        f: Interval map
        tree: Pruned tree of f
        classification: Critical classification of f
        horizon: Iterate budget of the enclosure search

    Returns:
        The tree with its basin covers and ``small_basins`` set

    Raises:
        BasinTooLarge: If a covering disc reaches beyond the strip
    """
    covers = []
    for k, orbit in enumerate(classification.attractors):
        for point, (lo, hi) in zip(orbit.points, basin_enclosure(f, classification, k, horizon)):
            cover = BasinCover(attractor=k, point=point, lo=lo, hi=hi)
            if cover.radius >= tree.domain_halfwidth:
                raise BasinTooLarge(
                    f"Basin enclosure [{lo:.6g}, {hi:.6g}] of the attractor through {point:.6g} "
                    f"needs radius {cover.radius:.4g}, not below a = {tree.domain_halfwidth:g}"
                )
            covers.append(cover)
    return replace(tree, basins=tuple(covers), small_basins=True)
