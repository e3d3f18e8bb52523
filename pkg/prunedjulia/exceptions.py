"""
Exception hierarchy for the toolkit.

Every error carries a human-readable ``detail`` and the process ``exit_code``
the command line reports for it: 2 for invalid input or a violated
precondition, 1 for a numerical failure.
"""


class PrunedJuliaError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ValidationFailure(PrunedJuliaError):
    """Input or precondition rejected."""

    exit_code = 2


class ComputationFailure(PrunedJuliaError):
    """A numerical procedure failed on valid input."""

    exit_code = 1


# polymap

class NotBoundaryPreserving(ValidationFailure):
    """f(-1) or f(1) is not in {-1, 1}."""


class CriticalPointOnBoundary(ValidationFailure):
    """Df vanishes at -1 or 1."""


class ConstraintViolation(ValidationFailure):
    """A tangent vector field violates a vanishing condition."""

    def __init__(self, detail: str, violations: list[str] | None = None):
        super().__init__(detail)
        self.violations = violations or []


class OverflowEscape(ComputationFailure):
    """An orbit left every reasonable strip."""


# orbits

class DegreeGuard(ValidationFailure):
    """The composed polynomial degree exceeds the guard."""


class NotParabolic(ValidationFailure):
    """The multiplier is not of modulus one."""


class Unresolved(ValidationFailure):
    """A critical orbit was not classified within the horizon."""

    def __init__(self, detail: str, index: int):
        super().__init__(detail)
        self.index = index


# koenigs

class NotInBasin(ValidationFailure):
    """Iterates do not converge to the attracting orbit."""


class SuperAttracting(ValidationFailure):
    """Linearization requested at a multiplier-zero orbit."""


# invariants

class CombinatoricsBroken(ValidationFailure):
    """Newton continuation of the frozen combinatorics failed."""


class AssumptionViolated(ValidationFailure):
    """A tangent field fails the vanishing needed by a formula."""


class DerivativeVanishes(ValidationFailure):
    """An iterate derivative vanishes on the sample."""


class DegenerateJacobian(ValidationFailure):
    """The parabolic defining map has a degenerate block."""


# prunedtree

class IntervalConstraint(ValidationFailure):
    """Pruning intervals violate disjointness or containment."""


class ArcEscape(ValidationFailure):
    """An arc left the strip of half-width a."""


class BranchAmbiguity(ComputationFailure):
    """Inverse-branch continuation could not stay on one branch."""


class TreeTooLarge(ValidationFailure):
    """The depth or arc-count guard was exceeded."""


class CriticalInDisc(ValidationFailure):
    """A critical value lies inside a pulled-back disc."""


class BasinTooLarge(ValidationFailure):
    """A basin enclosure exits the strip of half-width a."""


# external

class JumpTooLarge(ValidationFailure):
    """A lift jump is not of size in (0, 1)."""


class NotMonotone(ValidationFailure):
    """The lift is not strictly increasing between jumps."""


class SymmetryViolation(ValidationFailure):
    """The lift is not real symmetric."""


class QMeetsJumps(ValidationFailure):
    """The marked invariant set meets the jump set."""


class NeighborhoodMeetsQ(ValidationFailure):
    """A jump neighbourhood meets the marked invariant set."""


class NotInvariant(ValidationFailure):
    """An angle set is not forward invariant."""


class EndpointOnJump(ValidationFailure):
    """An arc endpoint coincides with a jump."""


class JumpsNotCovered(ValidationFailure):
    """The arcs do not cover every jump."""


class BoundaryNotEventuallyPeriodic(ValidationFailure):
    """An arc boundary point is not eventually periodic."""


class NoExpansionFound(ValidationFailure):
    """No iterate expands uniformly on the sample."""


class NotMarkov(ValidationFailure):
    """An interval is not mapped onto a component."""


class NoConvergence(ComputationFailure):
    """An iteration failed to converge."""


class QuadratureUnderresolved(ComputationFailure):
    """Refining the quadrature moved the result."""


class NeighborhoodOverlap(ValidationFailure):
    """Jump neighbourhoods overlap or leave (0, 1)."""


# barycentric

class NotInDisc(ValidationFailure):
    """The point is not inside the disc of admissible radius."""
