"""Fiber sampling by Newton iteration, and pointwise certificates.

``sample_fiber`` finds points with F(p) = alpha by damped Newton steps on
the two real equations Re(F - alpha) = 0, Im(F - alpha) = 0.  Steps are
least-norm solutions taken in the tangent space of the ambient space and
re-projected by the retraction, so accepted points satisfy the space
constraint to the same accuracy as the fiber residual.

``certify`` measures, per point, the mean curvature norm of the fiber and
the smallest singular value of the differential of F restricted to the
tangent space (the regularity margin).  ``holomorphy_defect`` measures how
far the horizontal part of the fiber tangent space is from being invariant
under the ambient complex structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DivisionByZero,
    EmptySample,
    InadmissibleAlpha,
    PartialSample,
    RetractUndefined,
    SingularNormalFrame,
)
from .morphisms import RationalMorphism, is_admissible, q_margin_ok
from .operators import euclidean_complement, fiber_mean_curvature, point_context
from .scalar import evaluate_jet1, evaluate_jet2
from .spaces import AmbientSpace, SpaceKind, inner, retract, random_point

__all__ = [
    "FiberPoint",
    "FiberSample",
    "MinimalityRow",
    "MinimalityReport",
    "sample_fiber",
    "certify",
    "holomorphy_defect",
]

RESIDUAL_TOL = 1e-10
_DEDUP_DISTANCE = 1e-6


@dataclass(frozen=True)
class FiberPoint:
    point: np.ndarray
    residual: float
    newton_iters: int


@dataclass
class FiberSample:
    """Accepted points on the fiber F^{-1}(alpha) of one morphism."""

    morphism: RationalMorphism
    alpha: complex
    points: list

    def __len__(self) -> int:
        return len(self.points)


def _tangent_basis(space: AmbientSpace, p: np.ndarray) -> np.ndarray | None:
    if space.is_flat:
        return None
    return euclidean_complement([space.real_signature * p], space.embedding_dim, 1)


def _newton_step(space, morphism, p, alpha):
    value, grad = evaluate_jet1(morphism.field, p)
    r = np.array([value.real - alpha.real, value.imag - alpha.imag])
    jac = np.vstack([grad.real, grad.imag])
    basis = _tangent_basis(space, p)
    if basis is not None:
        jac = jac @ basis
    step = -np.linalg.pinv(jac, rcond=1e-12) @ r
    if basis is not None:
        step = basis @ step
    return float(np.linalg.norm(r)), step


def _run_newton(space, morphism, start, alpha, max_iters):
    p = start
    res, step = _newton_step(space, morphism, p, alpha)
    if res <= RESIDUAL_TOL:
        return p, res, 0
    for it in range(1, max_iters + 1):
        damp = 1.0
        for _ in range(12):
            try:
                cand = retract(space, p + damp * step)
                cand_res, cand_step = _newton_step(space, morphism, cand, alpha)
            except (RetractUndefined, DivisionByZero):
                damp *= 0.5
                continue
            if cand_res <= res or damp <= 1.0 / 4096:
                p, res, step = cand, cand_res, cand_step
                break
            damp *= 0.5
        else:
            return None
        if res <= RESIDUAL_TOL:
            return p, res, it
    return None


def sample_fiber(
    morphism: RationalMorphism,
    alpha: complex,
    count: int = 25,
    seed: int = 0,
    max_iters: int = 50,
) -> FiberSample:
    """Collect ``count`` distinct fiber points, deterministic per seed.

    Raises InadmissibleAlpha when the morphism carries a resolvent and the
    value fails the admissibility margin, and PartialSample (carrying the
    partial result) when the retry budget of 10 * count starts runs out.
    """
    alpha = complex(alpha)
    if morphism.res is not None and not is_admissible(morphism, alpha):
        raise InadmissibleAlpha(f"alpha = {alpha} is zero or too close to a root of the resolvent")
    space = morphism.space
    rng = np.random.default_rng(seed)
    sample = FiberSample(morphism, alpha, [])
    starts = 0
    while len(sample.points) < count and starts < 10 * count:
        starts += 1
        start = random_point(space, rng)
        if not q_margin_ok(morphism, start):
            continue
        hit = _run_newton(space, morphism, start, alpha, max_iters)
        if hit is None:
            continue
        p, res, iters = hit
        if not q_margin_ok(morphism, p):
            continue
        if space.is_flat and space.is_indefinite and inner(space, p, p) >= 0:
            continue
        if any(np.linalg.norm(p - fp.point) < _DEDUP_DISTANCE for fp in sample.points):
            continue
        sample.points.append(FiberPoint(p, res, iters))
    if len(sample.points) < count:
        raise PartialSample(sample, count)
    return sample


# ---------------------------------------------------------------------------
# certification


@dataclass
class MinimalityRow:
    point: np.ndarray
    mean_curvature_norm: float
    gradient_margin: float
    critical: bool = False
    j_defect: float | None = None


@dataclass
class MinimalityReport:
    """Per-point minimality and regularity measurements with verdicts."""

    rows: list
    tol_H: float
    margin_grad: float

    @property
    def worst_mean_curvature(self) -> float:
        return max((r.mean_curvature_norm for r in self.rows if not r.critical), default=np.inf)

    @property
    def min_gradient_margin(self) -> float:
        return min((r.gradient_margin for r in self.rows), default=0.0)

    @property
    def minimal(self) -> bool:
        return bool(self.rows) and all(
            not r.critical and r.mean_curvature_norm <= self.tol_H for r in self.rows
        )

    @property
    def regular(self) -> bool:
        return bool(self.rows) and all(
            not r.critical and r.gradient_margin >= self.margin_grad for r in self.rows
        )


def _gradient_margin(space: AmbientSpace, morphism, p) -> float:
    """Smallest singular value of the differential of F on the tangent space."""
    _, grad = evaluate_jet1(morphism.field, p)
    jac = np.vstack([grad.real, grad.imag])
    basis = _tangent_basis(space, p)
    if basis is not None:
        jac = jac @ basis
    return float(np.linalg.svd(jac, compute_uv=False)[-1])


def certify(sample: FiberSample, tol_H: float = 1e-6, margin_grad: float = 1e-6) -> MinimalityReport:
    """Mean curvature and regularity margins for every sampled point.

    Points where the normal frame degenerates are marked critical; they
    fail both verdicts but do not abort the sweep.
    """
    if not sample.points:
        raise EmptySample("cannot certify an empty fiber sample")
    space = sample.morphism.space
    rows = []
    for fp in sample.points:
        margin = _gradient_margin(space, sample.morphism, fp.point)
        try:
            h1, h2, _ = fiber_mean_curvature(space, sample.morphism, fp.point)
            rows.append(MinimalityRow(fp.point, float(np.hypot(h1, h2)), margin))
        except SingularNormalFrame:
            rows.append(MinimalityRow(fp.point, np.inf, margin, critical=True))
    return MinimalityReport(rows, tol_H, margin_grad)


# ---------------------------------------------------------------------------
# holomorphy defect


def holomorphy_defect(space: AmbientSpace, morphism, p) -> float:
    """Non-invariance of the horizontal fiber tangent under J (multiplication by i).

    Computes the fiber tangent T at ``p``, intersects it with the horizontal
    space of the circle action (the orthogonal complement of i p inside T),
    applies J and returns the spectral norm of the component of the image
    outside T.  Zero means the quotient fiber is a candidate holomorphic
    submanifold; the constructions here score well away from zero.
    """
    if space.kind is not SpaceKind.SPHERE_COMPLEX:
        raise ValueError("the holomorphy defect is measured on complex spheres")
    p = np.asarray(p, dtype=float)
    jet = evaluate_jet2(getattr(morphism, "field", morphism), p)
    rows = [p, jet.grad.real, jet.grad.imag]
    fiber_basis = euclidean_complement(rows, space.embedding_dim, 3)
    jp = _apply_j(p)
    horizontal_basis = euclidean_complement(rows + [jp], space.embedding_dim, 4)
    image = np.column_stack([_apply_j(horizontal_basis[:, i]) for i in range(horizontal_basis.shape[1])])
    outside = image - fiber_basis @ (fiber_basis.T @ image)
    return float(np.linalg.svd(outside, compute_uv=False)[0])


def _apply_j(v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    out[0::2] = -v[1::2]
    out[1::2] = v[0::2]
    return out
