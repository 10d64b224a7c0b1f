"""Exception types shared across the package."""

from __future__ import annotations


class HarmomorphError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(HarmomorphError):
    """Vector or point length does not match the expected embedding dimension."""


class DivisionByZero(HarmomorphError):
    """A quotient denominator vanishes at the evaluation point."""

    def __init__(self, node, message: str = "quotient denominator vanishes"):
        super().__init__(message)
        self.node = node


class OffManifold(HarmomorphError):
    """Point violates the space constraint beyond the on-manifold tolerance."""


class RetractUndefined(HarmomorphError):
    """Retraction precondition fails (zero vector, or wrong causal type)."""


class ActionMismatch(HarmomorphError):
    """Group element applied to a space kind it does not act on."""


class FrameDegenerate(HarmomorphError):
    """Signed orthonormalization of a tangent space failed."""


class SingularNormalFrame(HarmomorphError):
    """The fiber normal frame is numerically singular (critical point)."""


class DependentCoefficients(HarmomorphError):
    """Coefficient matrices A and B are linearly dependent as vectors."""


class SingularB(HarmomorphError):
    """Coefficient matrix B is singular."""


class UnsupportedDegree(HarmomorphError):
    """Member power d is not supported for this space without the lift flag."""


class EmptyPolynomial(HarmomorphError):
    """Polynomial lift has no nonzero coefficient."""


class InadmissibleAlpha(HarmomorphError):
    """Fiber value alpha fails the admissibility test against the resolvent."""


class PartialSample(HarmomorphError):
    """Newton sampling ran out of budget before reaching the requested count.

    Carries the partial sample in ``sample``.
    """

    def __init__(self, sample, requested: int):
        got = len(sample.points)
        super().__init__(f"accepted {got} of {requested} requested fiber points")
        self.sample = sample
        self.requested = requested


class EmptySample(HarmomorphError):
    """Export or certification was asked for an empty fiber sample."""


class NoDualDefined(HarmomorphError):
    """The space kind has no duality partner."""


class ConfigError(HarmomorphError):
    """Run configuration is invalid.

    ``location`` is a human-readable position (job index or JSON line).
    """

    def __init__(self, location: str, reason: str):
        super().__init__(f"{location}: {reason}")
        self.location = location
        self.reason = reason
