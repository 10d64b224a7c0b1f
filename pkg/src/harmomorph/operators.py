"""Tension field, conformality operator and fiber mean curvature.

Conventions:

- The flat metric is sum_k s_k Re(z_k conj(w_k)) with the per-coordinate
  signs of the space; index raising multiplies the real gradient
  componentwise by the expanded signs.
- On the constraint surfaces the tension field is the signed trace of the
  surface Hessian over a signed orthonormal tangent frame, where
  Hess_M f(X, X) = Hess_flat f(X, X) + df(II(X, X)) with the second
  fundamental form II(X, X) = -<X,X> p on the sphere and +<<X,X>> p on the
  pseudosphere.  This combination only depends on the restriction of f,
  so any smooth extension of a field gives the same surface operators.
- Signed frames are produced from an eigendecomposition of the induced
  Gram matrix on a Euclidean-orthonormal basis of the tangent space,
  eigenvalues ascending, so timelike directions come first.  Spheres skip
  the decomposition (the induced metric there is the identity).

The conformality operator is complex bilinear: kappa(f, g) is the metric
inner product of the tangential index-raised gradients with no conjugation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FrameDegenerate, SingularNormalFrame
from .scalar import Jet2, ScalarField, evaluate_jet2, wirtinger_view
from .spaces import AmbientSpace, TangentVector, tangent_project

__all__ = [
    "OperatorValue",
    "NormalFrame",
    "PointContext",
    "point_context",
    "grad_on",
    "tau_kappa_flat",
    "tau_kappa_on",
    "tau_kappa",
    "fiber_mean_curvature",
    "euclidean_complement",
]

_FRAME_EIG_TOL = 1e-10
_GRAM_DET_TOL = 1e-10


@dataclass
class OperatorValue:
    """Tension field and conformality operator values at a point."""

    tau: complex
    kappa: complex
    at: np.ndarray


@dataclass
class NormalFrame:
    """Unit normals of a codimension-two fiber inside the space.

    ``gram`` holds the metric inner products of the raw (unnormalized)
    tangential gradients of Re F and Im F; where the conformality relation
    kappa(F, F) = 0 holds it is a multiple of the identity.
    """

    n1: np.ndarray
    n2: np.ndarray
    gram: np.ndarray


@dataclass
class PointContext:
    """Signed tangent frame of the space at one point, shared across fields."""

    frame: np.ndarray  # (2m, k) signed-orthonormal columns
    eps: np.ndarray  # (k,) metric signs of the frame vectors
    dim: int  # k


def euclidean_complement(rows, dim: int, expected_rank: int) -> np.ndarray:
    """Euclidean-orthonormal basis of the common kernel of the row functionals.

    Returns a (dim, dim - rank) matrix of columns.  Raises FrameDegenerate
    when the rows are rank-deficient below ``expected_rank``.
    """
    if not rows:
        return np.eye(dim)
    R = np.vstack(rows)
    _, s, vh = np.linalg.svd(R)
    if s[0] == 0.0:
        raise FrameDegenerate("all constraint rows vanish")
    rank = int(np.sum(s > s[0] * 1e-10))
    if rank < expected_rank:
        raise FrameDegenerate(f"constraint rows have rank {rank} < {expected_rank}")
    return vh[rank:].T.copy()


def _signed_frame(space: AmbientSpace, basis: np.ndarray):
    """Signed orthonormalization of a Euclidean-orthonormal basis."""
    if not space.is_indefinite:
        return np.ones(basis.shape[1]), basis
    gram = basis.T @ (space.real_signature[:, None] * basis)
    vals, vecs = np.linalg.eigh(gram)
    if np.min(np.abs(vals)) < _FRAME_EIG_TOL:
        raise FrameDegenerate("induced metric on the subspace is numerically degenerate")
    frame = basis @ (vecs / np.sqrt(np.abs(vals)))
    return np.sign(vals), frame


def point_context(space: AmbientSpace, p) -> PointContext | None:
    """Tangent frame data at ``p``; None on flat kinds (no frame needed)."""
    if space.is_flat:
        return None
    p = np.asarray(p, dtype=float)
    normal_row = space.real_signature * p
    basis = euclidean_complement([normal_row], space.embedding_dim, 1)
    eps, frame = _signed_frame(space, basis)
    return PointContext(frame, eps, frame.shape[1])


# ---------------------------------------------------------------------------
# gradients


def _raised_gradient(space: AmbientSpace, jet: Jet2) -> np.ndarray:
    return space.real_signature * jet.grad


def tangential_metric_gradient(space: AmbientSpace, jet: Jet2, p: np.ndarray) -> np.ndarray:
    """Index-raised gradient, projected onto the tangent space on curved kinds."""
    u = _raised_gradient(space, jet)
    if space.is_flat:
        return u
    # <<u, p>> equals the plain directional derivative df(p)
    dfp = jet.grad @ p
    return u - (dfp / space.constraint_value) * p


def grad_on(space: AmbientSpace, field: ScalarField, p) -> np.ndarray:
    """Metric gradient of a complex field, tangent to the space at ``p``.

    The real and imaginary parts are the gradients of Re(field) and
    Im(field) as real tangent vectors.
    """
    p = np.asarray(p, dtype=float)
    if space.is_curved:
        # validates the on-manifold precondition
        tangent_project(space, p, p)
    jet = evaluate_jet2(field, p)
    return tangential_metric_gradient(space, jet, p)


# ---------------------------------------------------------------------------
# tau and kappa


def _tau_flat(space: AmbientSpace, jet: Jet2):
    diag = np.diagonal(jet.hess)
    terms = space.real_signature * diag
    return complex(np.sum(terms)), float(np.sum(np.abs(terms)))


def _tau_curved(space: AmbientSpace, jet: Jet2, p: np.ndarray, ctx: PointContext):
    contracted = np.einsum("ai,ab,bi->i", ctx.frame, jet.hess, ctx.frame)
    terms = ctx.eps * contracted
    dfp = jet.grad @ p
    sign = -1.0 if space.is_sphere else 1.0
    tau = complex(np.sum(terms) + sign * ctx.dim * dfp)
    scale = float(np.sum(np.abs(terms)) + ctx.dim * abs(dfp))
    return tau, scale


def _tau_of_jet(space: AmbientSpace, jet: Jet2, p: np.ndarray, ctx: PointContext | None):
    if space.is_flat:
        return _tau_flat(space, jet)
    return _tau_curved(space, jet, p, ctx)


def _kappa_of_gradients(space: AmbientSpace, u: np.ndarray, w: np.ndarray):
    prods = space.real_signature * u * w
    return complex(np.sum(prods)), float(np.sum(np.abs(prods)))


def tau_kappa_flat(space: AmbientSpace, f: ScalarField, g: ScalarField, p) -> OperatorValue:
    """Flat-space tension field of ``f`` and conformality of the pair (f, g).

    Computed from the Wirtinger view: tau = 4 sum_k s_k d^2 f / dz_k dzbar_k
    and kappa = 2 sum_k s_k (df/dz_k dg/dzbar_k + df/dzbar_k dg/dz_k).
    """
    if not space.is_flat:
        raise ValueError("tau_kappa_flat expects a flat space kind")
    p = np.asarray(p, dtype=float)
    jf = evaluate_jet2(f, p)
    jg = jf if g is f else evaluate_jet2(g, p)
    signs = np.asarray(space.signature, dtype=float)
    wf = wirtinger_view(jf, space.m)
    wg = wf if g is f else wirtinger_view(jg, space.m)
    tau = 4.0 * complex(np.sum(signs * np.diagonal(wf.dzdzbar)))
    kappa = 2.0 * complex(np.sum(signs * (wf.dz * wg.dzbar + wf.dzbar * wg.dz)))
    return OperatorValue(tau, kappa, p)


def tau_kappa_on(space: AmbientSpace, f: ScalarField, g: ScalarField, p) -> OperatorValue:
    """Tension field and conformality operator on the constraint surfaces."""
    if not space.is_curved:
        raise ValueError("tau_kappa_on expects a sphere or pseudosphere kind")
    p = np.asarray(p, dtype=float)
    ctx = point_context(space, p)
    jf = evaluate_jet2(f, p)
    jg = jf if g is f else evaluate_jet2(g, p)
    tau, _ = _tau_of_jet(space, jf, p, ctx)
    uf = tangential_metric_gradient(space, jf, p)
    ug = uf if g is f else tangential_metric_gradient(space, jg, p)
    kappa, _ = _kappa_of_gradients(space, uf, ug)
    return OperatorValue(tau, kappa, p)


def tau_kappa(space: AmbientSpace, f: ScalarField, g: ScalarField, p) -> OperatorValue:
    """Dispatch to the flat or curved operator pair for the space kind."""
    if space.is_flat:
        return tau_kappa_flat(space, f, g, p)
    return tau_kappa_on(space, f, g, p)


# ---------------------------------------------------------------------------
# fiber geometry


def _real_hess_trace(hess_w, grad_w, p, frame, eps, sign):
    contracted = np.einsum("ai,ab,bi->i", frame, hess_w, frame)
    trace = float(np.sum(eps * contracted))
    if sign != 0.0:
        trace += sign * frame.shape[1] * float(grad_w @ p)
    return trace


def _tangential_real(space: AmbientSpace, g: np.ndarray, p: np.ndarray) -> np.ndarray:
    u = space.real_signature * g
    if space.is_flat:
        return u
    return u - (float(g @ p) / space.constraint_value) * p


def fiber_mean_curvature(space: AmbientSpace, morphism_or_field, p, *, jet: Jet2 | None = None):
    """Mean curvature components of the level set of F through ``p``.

    Returns (h1, h2, NormalFrame) where h_k is the mean curvature vector
    paired with the unit normal along grad of Re F (resp. Im F):

        h_k = - (signed trace of Hess_M w_k over the fiber frame) / |grad_M w_k|

    Raises SingularNormalFrame when the normal Gram matrix is numerically
    singular or not positive, which marks ``p`` as critical.
    """
    field = getattr(morphism_or_field, "field", morphism_or_field)
    p = np.asarray(p, dtype=float)
    if jet is None:
        jet = evaluate_jet2(field, p)

    grad_re = jet.grad.real.copy()
    grad_im = jet.grad.imag.copy()
    g1 = _tangential_real(space, grad_re, p)
    g2 = _tangential_real(space, grad_im, p)
    eta = space.real_signature
    gram = np.array(
        [
            [float(np.dot(eta * g1, g1)), float(np.dot(eta * g1, g2))],
            [float(np.dot(eta * g2, g1)), float(np.dot(eta * g2, g2))],
        ]
    )
    scale = float(np.max(np.abs(gram)))
    det = float(np.linalg.det(gram))
    if scale == 0.0 or gram[0, 0] <= 0.0 or gram[1, 1] <= 0.0 or det <= _GRAM_DET_TOL * scale**2:
        raise SingularNormalFrame(f"normal Gram matrix is degenerate (det {det:.3e}, scale {scale:.3e})")

    n1 = g1 / np.sqrt(gram[0, 0])
    u2 = g2 - (gram[0, 1] / gram[0, 0]) * g1
    n2 = u2 / np.sqrt(det / gram[0, 0])

    rows = [grad_re, grad_im]
    if space.is_curved:
        rows.insert(0, eta * p)
    try:
        basis = euclidean_complement(rows, space.embedding_dim, len(rows))
        eps, frame = _signed_frame(space, basis)
    except FrameDegenerate as exc:
        raise SingularNormalFrame(str(exc)) from exc

    sign = 0.0
    if space.is_sphere:
        sign = -1.0
    elif space.is_pseudosphere:
        sign = 1.0
    t1 = _real_hess_trace(jet.hess.real, grad_re, p, frame, eps, sign)
    t2 = _real_hess_trace(jet.hess.imag, grad_im, p, frame, eps, sign)
    h1 = -t1 / np.sqrt(gram[0, 0])
    h2 = -t2 / np.sqrt(gram[1, 1])
    return h1, h2, NormalFrame(n1, n2, gram)
