"""Eigenfamily catalog, verification sweeps and homogeneous polynomial lifts.

An eigenfamily is a finite set of complex fields that are simultaneously
eigen for the tension field (eigenvalue lambda) and, pairwise, for the
conformality operator (eigenvalue mu).  The catalog carries one family per
space kind:

    flat kinds                       (0, 0)        products z_j conj(z_k)
    sphere, complex or quaternionic  (-8n, -4)     same products over <z,z>
    pseudosphere variants            (+8n, +4)     negated products over <<z,z>>

plus the basic family z_j / |z| on odd-dimensional round spheres with
eigenvalues (-(2m-1), -1) over C^m.

Index ranges split the coordinates (quaternionic: the columns) into a left
half for the unconjugated factor and a right half for the conjugated one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import scalar as sc
from .errors import EmptyPolynomial
from .operators import (
    _kappa_of_gradients,
    _tau_of_jet,
    point_context,
    tangential_metric_gradient,
)
from .scalar import ScalarField, evaluate_jet2
from .spaces import AmbientSpace, SpaceKind, random_point

__all__ = [
    "EigenFamily",
    "FamilyReport",
    "PolyLift",
    "catalog",
    "basic_sphere_family",
    "verify_eigenfamily",
    "measure_eigenvalues",
    "lift_poly",
    "random_lift",
]

# below this magnitude the residuals are taken absolutely instead of relatively
_RELATIVE_FLOOR = 1e-3


@dataclass(frozen=True)
class EigenFamily:
    """A finite eigenfamily on a space with its claimed eigenvalues."""

    space: AmbientSpace
    members: tuple
    lam: complex
    mu: complex
    name: str

    def __post_init__(self):
        if not self.members:
            raise ValueError("eigenfamily needs at least one member")
        _check_independent(self.space, self.members)

    def __len__(self) -> int:
        return len(self.members)


def _check_independent(space: AmbientSpace, members, seed: int = 20_250_101):
    """Random-evaluation Gram rank check for member independence."""
    rng = np.random.default_rng(seed)
    pts = [random_point(space, rng) for _ in range(len(members) + 4)]
    mat = np.array([[complex(evaluate_jet2(f, p).value) for f in members] for p in pts])
    svals = np.linalg.svd(mat, compute_uv=False)
    if svals[0] == 0.0 or svals[-1] == 0.0 or svals[0] / svals[-1] > 1e8:
        raise ValueError("family members are numerically linearly dependent")


def _index_split(count: int):
    half = count // 2
    return range(1, half + 1), range(half + 1, count + 1)


def _pair_product(space: AmbientSpace, j: int, k: int) -> ScalarField:
    """The quadratic member z_j conj(z_k), summed over rows on matrix spaces."""
    if space.is_quaternionic:
        ncols = space.ncols
        return sc.z(j) * sc.zbar(k) + sc.z(ncols + j) * sc.zbar(ncols + k)
    return sc.z(j) * sc.zbar(k)


def catalog(space: AmbientSpace) -> EigenFamily:
    """The catalog eigenfamily of the space, with its claimed eigenvalues."""
    count = space.ncols if space.is_quaternionic else space.m
    if count < 2:
        raise ValueError("catalog needs at least two coordinates (or columns) to split")
    left, right = _index_split(count)
    members = []
    if space.is_flat:
        lam, mu = 0.0, 0.0
        for j, k in itertools.product(left, right):
            members.append(_pair_product(space, j, k))
    else:
        norm = sc.inner_square(space.signature)
        if space.is_sphere:
            lam, mu = -4.0 * space.m, -4.0
            for j, k in itertools.product(left, right):
                members.append(_pair_product(space, j, k) / norm)
        else:
            lam, mu = 4.0 * space.m, 4.0
            for j, k in itertools.product(left, right):
                members.append(-_pair_product(space, j, k) / norm)
    return EigenFamily(space, tuple(members), complex(lam), complex(mu), space.kind.value)


def basic_sphere_family(space: AmbientSpace) -> EigenFamily:
    """The coordinate family on a round sphere in C^m, eigenvalues (-(2m-1), -1).

    Members are represented by the ambient coordinates z_j; on the sphere
    these agree with the normalized fields z_j / |z| and the surface
    operators only see the restriction.
    """
    if space.kind is not SpaceKind.SPHERE_COMPLEX:
        raise ValueError("the basic family lives on complex spheres")
    members = tuple(sc.z(j) for j in range(1, space.m + 1))
    return EigenFamily(space, members, complex(-(2 * space.m - 1)), complex(-1.0), "sphere-basic")


# ---------------------------------------------------------------------------
# verification


@dataclass
class FamilyReport:
    """Worst-case residuals of an eigenfamily verification sweep."""

    name: str
    lam: complex
    mu: complex
    points: int
    worst_tau: float
    worst_kappa: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.worst_tau, self.worst_kappa) <= self.tol


def _tau_residual(tau: complex, lam: complex, value: complex) -> float:
    resid = abs(tau - lam * value)
    if abs(value) > _RELATIVE_FLOOR:
        return resid / (abs(value) * max(1.0, abs(lam)))
    return resid


def _kappa_residual(kappa: complex, mu: complex, vf: complex, vg: complex) -> float:
    resid = abs(kappa - mu * vf * vg)
    if min(abs(vf), abs(vg)) > _RELATIVE_FLOOR:
        return resid / (abs(vf * vg) * max(1.0, abs(mu)))
    return resid


def verify_eigenfamily(
    fam: EigenFamily, points: int = 100, tol: float = 1e-8, seed: int = 0
) -> FamilyReport:
    """Check tau(f) = lambda f and kappa(f, g) = mu f g at random points.

    Residuals are relative where the member values are bounded away from
    zero (floor 1e-3) and absolute otherwise.  Failures are reported, not
    raised.
    """
    if points < 1:
        raise ValueError("points must be >= 1")
    space = fam.space
    rng = np.random.default_rng(seed)
    eta = space.real_signature
    worst_tau = 0.0
    worst_kappa = 0.0
    for _ in range(points):
        p = random_point(space, rng)
        ctx = point_context(space, p)
        jets = [evaluate_jet2(f, p) for f in fam.members]
        values = np.array([j.value for j in jets])
        grads = np.array([tangential_metric_gradient(space, j, p) for j in jets])
        for i, jet in enumerate(jets):
            tau, _ = _tau_of_jet(space, jet, p, ctx)
            worst_tau = max(worst_tau, _tau_residual(tau, fam.lam, values[i]))
        kappa_mat = (grads * eta) @ grads.T
        for i in range(len(jets)):
            for j in range(len(jets)):
                worst_kappa = max(
                    worst_kappa,
                    _kappa_residual(kappa_mat[i, j], fam.mu, values[i], values[j]),
                )
    return FamilyReport(fam.name, fam.lam, fam.mu, points, worst_tau, worst_kappa, tol)


def measure_eigenvalues(fam: EigenFamily, points: int = 25, seed: int = 0):
    """Median of tau(f)/f and kappa(f, g)/(f g) over random points.

    Independent of the claimed eigenvalues; used to observe sign flips
    under duality.
    """
    space = fam.space
    rng = np.random.default_rng(seed)
    eta = space.real_signature
    lam_samples = []
    mu_samples = []
    while len(lam_samples) < points:
        p = random_point(space, rng)
        ctx = point_context(space, p)
        jets = [evaluate_jet2(f, p) for f in fam.members]
        values = np.array([j.value for j in jets])
        grads = np.array([tangential_metric_gradient(space, j, p) for j in jets])
        kappa_mat = (grads * eta) @ grads.T
        for i, jet in enumerate(jets):
            if abs(values[i]) < _RELATIVE_FLOOR:
                continue
            tau, _ = _tau_of_jet(space, jet, p, ctx)
            lam_samples.append(tau / values[i])
            for j in range(len(jets)):
                if abs(values[j]) > _RELATIVE_FLOOR:
                    mu_samples.append(kappa_mat[i, j] / (values[i] * values[j]))
    lam = complex(np.median(np.real(lam_samples)), np.median(np.imag(lam_samples)))
    mu = complex(np.median(np.real(mu_samples)), np.median(np.imag(mu_samples)))
    return lam, mu


# ---------------------------------------------------------------------------
# homogeneous polynomial lifts


@dataclass(frozen=True)
class PolyLift:
    """Homogeneous degree-d polynomial in the members of a base family."""

    base: EigenFamily
    d: int
    coefficients: tuple  # ((multi_index, coefficient), ...)
    field: ScalarField


def _monomial(members, exponents) -> ScalarField:
    factors = []
    for f, e in zip(members, exponents):
        if e == 1:
            factors.append(f)
        elif e > 1:
            factors.append(sc.Power(f, e))
    prod = factors[0]
    for f in factors[1:]:
        prod = prod * f
    return prod


def lift_poly(fam: EigenFamily, d: int, coefficients):
    """Build a degree-d polynomial lift and predict its eigenvalues.

    ``coefficients`` maps multi-indices (tuples of length len(fam), summing
    to d) to complex numbers.  Returns (PolyLift, predicted_lambda,
    predicted_mu) with the degree transform

        lambda_d = d lambda + d (d - 1) mu,    mu_d = d^2 mu.
    """
    if d < 1:
        raise ValueError("degree d must be >= 1")
    entries = [(tuple(idx), complex(c)) for idx, c in dict(coefficients).items() if c != 0]
    if not entries:
        raise EmptyPolynomial("no nonzero coefficient in the polynomial lift")
    for idx, _ in entries:
        if len(idx) != len(fam) or any(e < 0 for e in idx) or sum(idx) != d:
            raise ValueError(f"multi-index {idx} is not a degree-{d} index over {len(fam)} members")
    terms = [sc.Const(c) * _monomial(fam.members, idx) for idx, c in entries]
    field = terms[0]
    for t in terms[1:]:
        field = field + t
    lam_d = d * fam.lam + d * (d - 1) * fam.mu
    mu_d = d * d * fam.mu
    return PolyLift(fam, d, tuple(entries), field), lam_d, mu_d


def random_lift(fam: EigenFamily, d: int, rng: np.random.Generator, terms: int = 3):
    """Random degree-d lift with a few dense-ish multi-indices, for sweeps."""
    nm = len(fam)
    coeffs = {}
    for _ in range(max(1, terms)):
        idx = [0] * nm
        for _ in range(d):
            idx[int(rng.integers(nm))] += 1
        coeffs[tuple(idx)] = complex(rng.standard_normal(), rng.standard_normal())
    return lift_poly(fam, d, coeffs)


def lifted_family(fam: EigenFamily, lifts, lam: complex, mu: complex, name: str) -> EigenFamily:
    """Package polynomial lifts as a family with claimed eigenvalues."""
    return EigenFamily(fam.space, tuple(l.field for l in lifts), lam, mu, name)
