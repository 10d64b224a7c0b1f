"""Rational maps F = P/Q over a catalog eigenfamily, and their certificates.

P and Q are coefficient combinations of d-th powers of the family members;
on the domain where Q does not vanish the quotient is a harmonic morphism,
which is verified numerically as tau(F) ~ 0 and kappa(F, F) ~ 0.  The
resolvent polynomial R(s) = det(s B - A) controls which fiber values are
admissible: away from its roots every fiber point is regular.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import scalar as sc
from .errors import (
    DependentCoefficients,
    DimensionMismatch,
    NoDualDefined,
    SingularB,
    UnsupportedDegree,
)
from .families import EigenFamily, catalog
from .operators import (
    _kappa_of_gradients,
    _tau_of_jet,
    point_context,
    tangential_metric_gradient,
)
from .scalar import ScalarField, evaluate_jet2
from .spaces import AmbientSpace, group_act, random_group, random_point

__all__ = [
    "CoefficientPair",
    "ResolventPolynomial",
    "RationalMorphism",
    "MorphismReport",
    "InvarianceReport",
    "resolvent",
    "build_morphism",
    "is_admissible",
    "verify_morphism",
    "verify_invariance",
    "dualize",
    "random_coefficient_pair",
]

OMEGA_MARGIN = 1e-6
ADMISSIBLE_MARGIN = 1e-6


@dataclass(frozen=True)
class CoefficientPair:
    """Square coefficient matrices (A, B) and the member power d.

    A and B must be linearly independent as vectors and B invertible.
    """

    A: np.ndarray
    B: np.ndarray
    d: int = 1

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        B = np.asarray(self.B, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
            raise DimensionMismatch(f"A and B must be square matrices of equal shape, got {A.shape} and {B.shape}")
        if self.d < 1:
            raise ValueError("power d must be >= 1")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        a = A.ravel()
        b = B.ravel()
        na = np.linalg.norm(a)
        nb = np.linalg.norm(b)
        if na == 0 or nb == 0 or abs(np.vdot(a, b)) >= (1 - 1e-12) * na * nb:
            raise DependentCoefficients("A and B are linearly dependent as coefficient vectors")
        svals = np.linalg.svd(B, compute_uv=False)
        if svals[-1] <= 1e-10 * svals[0]:
            raise SingularB("matrix B is numerically singular")

    @property
    def size(self) -> int:
        return self.A.shape[0]

    def to_json_dict(self) -> dict:
        def pairs(mat):
            return [[float(v.real), float(v.imag)] for v in np.asarray(mat).ravel()]

        return {"n": self.size, "d": self.d, "A": pairs(self.A), "B": pairs(self.B)}

    @classmethod
    def from_json_dict(cls, data: dict) -> "CoefficientPair":
        n = int(data["n"])
        d = int(data.get("d", 1))

        def mat(entries):
            flat = [complex(re, im) for re, im in entries]
            if len(flat) != n * n:
                raise DimensionMismatch(f"expected {n * n} coefficient pairs, got {len(flat)}")
            return np.array(flat, dtype=complex).reshape(n, n)

        return cls(mat(data["A"]), mat(data["B"]), d)


@dataclass(frozen=True)
class ResolventPolynomial:
    """det(s B - A) with coefficients stored by ascending power of s."""

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def norm(self) -> float:
        return max(abs(c) for c in self.coeffs)

    def __call__(self, s: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def roots(self) -> np.ndarray:
        return np.roots(list(reversed(self.coeffs)))


def _charpoly(M: np.ndarray) -> np.ndarray:
    """Coefficients of det(s I - M), ascending, by the Faddeev-LeVerrier recurrence."""
    k = M.shape[0]
    coeffs = np.zeros(k + 1, dtype=complex)
    coeffs[k] = 1.0
    N = np.zeros_like(M)
    c = 1.0 + 0j
    for i in range(1, k + 1):
        N = M @ N + c * np.eye(k, dtype=complex)
        c = -np.trace(M @ N) / i
        coeffs[k - i] = c
    return coeffs


def resolvent(pair: CoefficientPair) -> ResolventPolynomial:
    """The resolvent polynomial R(s) = det(s B - A).

    Since det B != 0, R(s) = det(B) det(s I - B^{-1} A), degree exactly n.
    """
    Binv_A = np.linalg.solve(pair.B, pair.A)
    det_b = complex(np.linalg.det(pair.B))
    return ResolventPolynomial(tuple(det_b * c for c in _charpoly(Binv_A)))


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class RationalMorphism:
    """F = P/Q on a space, with the data needed for its certificates."""

    space: AmbientSpace
    P: ScalarField
    Q: ScalarField
    field: ScalarField
    pair: CoefficientPair | None
    res: ResolventPolynomial | None
    duality: str  # compact | noncompact | flat
    family: EigenFamily | None = None

    @classmethod
    def from_fields(cls, space: AmbientSpace, P: ScalarField, Q: ScalarField) -> "RationalMorphism":
        """Ad-hoc quotient with no coefficient data (controls, experiments)."""
        return cls(space, P, Q, P / Q, None, None, _duality_tag(space))


def _duality_tag(space: AmbientSpace) -> str:
    if space.is_sphere:
        return "compact"
    if space.is_pseudosphere:
        return "noncompact"
    return "flat"


def build_morphism(space: AmbientSpace, pair: CoefficientPair, *, allow_power: bool = False) -> RationalMorphism:
    """Assemble F = P/Q from the catalog family of the space.

    P = sum_jk A[j, k] member_jk^d and likewise Q with B.  On quaternionic
    spaces the members carry no power unless ``allow_power`` lifts them
    (their predicted eigenvalues then follow the degree transform and are
    verified, not assumed).
    """
    fam = catalog(space)
    count = space.ncols if space.is_quaternionic else space.m
    half = count // 2
    if count != 2 * half or half != pair.size:
        raise DimensionMismatch(
            f"space splits into {half} x {count - half} member indices, incompatible with {pair.size} x {pair.size} coefficients"
        )
    if space.is_quaternionic and pair.d > 1 and not allow_power:
        raise UnsupportedDegree("quaternionic members take powers only via the polynomial lift; pass allow_power=True")

    def combine(mat: np.ndarray) -> ScalarField:
        terms = []
        for r in range(half):
            for c in range(half):
                member = fam.members[r * half + c]
                powered = member if pair.d == 1 else sc.Power(member, pair.d)
                terms.append(sc.Const(complex(mat[r, c])) * powered)
        acc = terms[0]
        for t in terms[1:]:
            acc = acc + t
        return acc

    P = combine(pair.A)
    Q = combine(pair.B)
    return RationalMorphism(space, P, Q, P / Q, pair, resolvent(pair), _duality_tag(space), fam)


def is_admissible(morphism: RationalMorphism, alpha: complex, margin: float = ADMISSIBLE_MARGIN) -> bool:
    """Whether alpha is a safe fiber value: nonzero and away from roots of R."""
    if morphism.res is None:
        raise ValueError("morphism has no resolvent data")
    alpha = complex(alpha)
    if abs(alpha) <= margin:
        return False
    res = morphism.res
    bound = margin * (1.0 + abs(alpha)) ** res.degree * res.norm
    return abs(res(alpha)) > bound


def q_margin_ok(morphism: RationalMorphism, p, margin: float = OMEGA_MARGIN) -> bool:
    """Domain membership: |Q(p)| must clear the margin relative to its term sizes."""
    scale, value = _term_scale(morphism.Q, p)
    return abs(value) > margin * max(scale, 1e-30)


def _term_scale(field: ScalarField, p) -> tuple:
    """(sum of |term| over top-level summands, value) at a point."""
    if isinstance(field, sc.Sum):
        values = [sc.evaluate_value(t, p) for t in field.terms]
        return sum(abs(v) for v in values), sum(values, 0j)
    value = sc.evaluate_value(field, p)
    return abs(value), value


# ---------------------------------------------------------------------------
# certificates


@dataclass
class MorphismReport:
    """Worst normalized tau / kappa residuals of a morphism sweep."""

    points: int
    worst_tau: float
    worst_kappa: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.worst_tau, self.worst_kappa) <= self.tol


def _domain_point(morphism: RationalMorphism, rng) -> np.ndarray:
    for _ in range(10_000):
        p = random_point(morphism.space, rng)
        if q_margin_ok(morphism, p):
            return p
    raise RuntimeError("could not sample a point clearing the domain margin")


def verify_morphism(
    morphism: RationalMorphism, points: int = 100, tol: float = 1e-8, seed: int = 0
) -> MorphismReport:
    """Check tau(F) ~ 0 and kappa(F, F) ~ 0 at random domain points.

    Residuals are normalized by the local magnitude of the quantities the
    operators sum over (the cancellation scale), so a genuine morphism
    scores near machine precision regardless of the local gradient size.
    """
    space = morphism.space
    rng = np.random.default_rng(seed)
    worst_tau = 0.0
    worst_kappa = 0.0
    for _ in range(points):
        p = _domain_point(morphism, rng)
        ctx = point_context(space, p)
        jet = evaluate_jet2(morphism.field, p)
        tau, tau_scale = _tau_of_jet(space, jet, p, ctx)
        u = tangential_metric_gradient(space, jet, p)
        kappa, kappa_scale = _kappa_of_gradients(space, u, u)
        worst_tau = max(worst_tau, abs(tau) / max(tau_scale, 1e-12))
        worst_kappa = max(worst_kappa, abs(kappa) / max(kappa_scale, 1e-12))
    return MorphismReport(points, worst_tau, worst_kappa, tol)


@dataclass
class InvarianceReport:
    """Worst |F(g p) - F(p)| over sampled group elements and points."""

    samples: int
    worst_defect: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst_defect <= self.tol


def verify_invariance(
    morphism: RationalMorphism, samples: int = 20, tol: float = 1e-12, seed: int = 0
) -> InvarianceReport:
    """Invariance of F under the space's group action at random samples."""
    space = morphism.space
    if not space.is_curved:
        raise ValueError("group invariance applies to sphere and pseudosphere kinds")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        p = _domain_point(morphism, rng)
        g = random_group(space, rng)
        moved = group_act(space, g, p)
        v0 = sc.evaluate_value(morphism.field, p)
        v1 = sc.evaluate_value(morphism.field, moved)
        worst = max(worst, abs(v1 - v0))
    return InvarianceReport(samples, worst, tol)


def dualize(morphism: RationalMorphism) -> RationalMorphism:
    """The same coefficients mounted on the partner space.

    Sphere <-> pseudosphere and definite <-> indefinite flat kinds pair up;
    the map is an involution on (A, B, d, space) and preserves the resolvent
    exactly.
    """
    if morphism.pair is None:
        raise NoDualDefined("ad-hoc morphisms carry no coefficient data to transport")
    partner = morphism.space.dual()
    return build_morphism(partner, morphism.pair, allow_power=True)


def random_coefficient_pair(size: int, rng: np.random.Generator, d: int = 1) -> CoefficientPair:
    """Generic complex (A, B) pair; resamples on the measure-zero failures."""
    for _ in range(100):
        A = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        B = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        try:
            return CoefficientPair(A, B, d)
        except (DependentCoefficients, SingularB):
            continue
    raise RuntimeError("failed to draw a generic coefficient pair")
