"""Independent numerical oracles for the test suite.

Nothing here reuses the package's jet arithmetic: fields are evaluated by a
separate vectorized tree walk in extended precision (x86 long double), and
derivatives are estimated by central finite differences.  The geodesic
Laplacian oracle measures the surface Laplacian on spheres from second
differences along great circles, independent of the second-fundamental-form
correction used by the package.
"""

from __future__ import annotations

import numpy as np

from harmomorph import scalar as sc

LD = np.longdouble
CLD = np.clongdouble

FD_STEP = LD(1e-5)


def eval_batch(field, X: np.ndarray) -> np.ndarray:
    """Evaluate ``field`` at a batch of points (N, 2m) -> (N,), long double."""
    X = np.asarray(X, dtype=LD)
    if isinstance(field, sc.Coord):
        return X[:, 2 * field.index - 2] + CLD(1j) * X[:, 2 * field.index - 1]
    if isinstance(field, sc.ConjCoord):
        return X[:, 2 * field.index - 2] - CLD(1j) * X[:, 2 * field.index - 1]
    if isinstance(field, sc.Const):
        return np.full(X.shape[0], CLD(field.value))
    if isinstance(field, sc.Sum):
        acc = np.zeros(X.shape[0], dtype=CLD)
        for t in field.terms:
            acc = acc + eval_batch(t, X)
        return acc
    if isinstance(field, sc.Product):
        acc = np.ones(X.shape[0], dtype=CLD)
        for f in field.factors:
            acc = acc * eval_batch(f, X)
        return acc
    if isinstance(field, sc.Power):
        return eval_batch(field.base, X) ** field.exponent
    if isinstance(field, sc.Quotient):
        return eval_batch(field.num, X) / eval_batch(field.den, X)
    if isinstance(field, sc.InnerSquare):
        eta = np.repeat(np.asarray(field.signs, dtype=LD), 2)
        return (X * X * eta).sum(axis=1).astype(CLD)
    raise TypeError(f"unknown node {type(field).__name__}")


def _stencil_offsets(dim: int, h) -> np.ndarray:
    """Offsets for one central-difference 2-jet: (1 + 2 dim^2, dim)."""
    rows = [np.zeros(dim, dtype=LD)]
    for a in range(dim):
        for s in (h, -h):
            off = np.zeros(dim, dtype=LD)
            off[a] = s
            rows.append(off)
    for a in range(dim):
        for b in range(a + 1, dim):
            for sa in (h, -h):
                for sb in (h, -h):
                    off = np.zeros(dim, dtype=LD)
                    off[a] = sa
                    off[b] = sb
                    rows.append(off)
    return np.array(rows, dtype=LD)


def fd_jets(field, points, h=FD_STEP):
    """Central finite-difference 2-jets at many points.

    All stencil evaluations run in long double, so the subtractive
    cancellation of the Hessian stencils stays near 1e-9 absolute.  Returns
    a list of (value, grad, hess) triples in complex128.
    """
    pts = np.asarray(points, dtype=LD)
    if pts.ndim == 1:
        pts = pts[None, :]
    npts, dim = pts.shape
    offsets = _stencil_offsets(dim, LD(h))
    stride = offsets.shape[0]
    batch = (pts[:, None, :] + offsets[None, :, :]).reshape(npts * stride, dim)
    values = eval_batch(field, batch).reshape(npts, stride)

    h = LD(h)
    f0 = values[:, 0]
    plus = values[:, 1 : 2 * dim + 1 : 2]
    minus = values[:, 2 : 2 * dim + 2 : 2]
    grads = (plus - minus) / (2 * h)
    diag = (plus - 2 * f0[:, None] + minus) / (h * h)
    pair_vals = values[:, 1 + 2 * dim :].reshape(npts, -1, 4)
    mixed = (pair_vals[:, :, 0] - pair_vals[:, :, 1] - pair_vals[:, :, 2] + pair_vals[:, :, 3]) / (
        4 * h * h
    )
    iu, ju = np.triu_indices(dim, k=1)
    out = []
    for i in range(npts):
        hess = np.zeros((dim, dim), dtype=CLD)
        hess[np.arange(dim), np.arange(dim)] = diag[i]
        hess[iu, ju] = mixed[i]
        hess[ju, iu] = mixed[i]
        out.append((complex(f0[i]), grads[i].astype(complex), hess.astype(complex)))
    return out


def fd_jet(field, point, h=FD_STEP):
    return fd_jets(field, [point], h)[0]


def jet_agreement(field, point, jet, h=FD_STEP) -> float:
    """Worst per-component |fd - jet| / (1 + |jet|) over value, grad, hess."""
    v, g, hh = fd_jet(field, point, h)
    return _triple_agreement((v, g, hh), jet)


def _triple_agreement(triple, jet) -> float:
    v, g, hh = triple
    worst = abs(v - jet.value) / (1.0 + abs(jet.value))
    worst = max(worst, np.max(np.abs(g - jet.grad) / (1.0 + np.abs(jet.grad))))
    worst = max(worst, np.max(np.abs(hh - jet.hess) / (1.0 + np.abs(jet.hess))))
    return float(worst)


def geodesic_laplacian_sphere(field, p, h=1e-4) -> complex:
    """Surface Laplacian on the unit sphere from great-circle second differences.

    Requires |p| = 1.  Sums (f(cos(h) p + sin(h) e) - 2 f(p) + f(...-h...)) / h^2
    over a Euclidean-orthonormal tangent basis; the curves are exact
    geodesics, so no curvature correction enters.
    """
    p = np.asarray(p, dtype=LD)
    hl = LD(h)
    basis = _orthonormal_complement(np.asarray(p, dtype=float))
    ch, sh = np.cos(hl), np.sin(hl)
    pts = [p]
    for i in range(basis.shape[1]):
        e = basis[:, i].astype(LD)
        pts.append(ch * p + sh * e)
        pts.append(ch * p - sh * e)
    values = eval_batch(field, np.array(pts, dtype=LD))
    total = CLD(0)
    for i in range(basis.shape[1]):
        total = total + (values[1 + 2 * i] - 2 * values[0] + values[2 + 2 * i])
    return complex(total / (hl * hl))


def _orthonormal_complement(p: np.ndarray) -> np.ndarray:
    dim = p.shape[0]
    mat = np.eye(dim)
    mat[:, 0] = p / np.linalg.norm(p)
    q, _ = np.linalg.qr(mat)
    # first column of q spans p, the rest its orthocomplement
    return q[:, 1:]


def brute_resolvent_values(A, B, svals):
    """det(s B - A) straight from the determinant, one value per sample."""
    return [complex(np.linalg.det(s * np.asarray(B) - np.asarray(A))) for s in svals]


def interpolated_poly_coeffs(A, B, degree: int) -> np.ndarray:
    """Resolvent coefficients by Lagrange interpolation on sampled determinants."""
    svals = np.arange(degree + 1, dtype=float) + 0.5
    dets = brute_resolvent_values(A, B, svals)
    vander = np.vander(svals, degree + 1, increasing=True).astype(complex)
    return np.linalg.solve(vander, np.array(dets))


def all_catalog_families(ns=(2, 3)):
    """Every catalog family plus the basic sphere family, for sweep tests."""
    from harmomorph import AmbientSpace, SpaceKind, basic_sphere_family, catalog

    fams = []
    for kind in SpaceKind:
        for n in ns:
            fams.append(catalog(AmbientSpace(kind, n, 2 * n)))
    for n in ns:
        fams.append(basic_sphere_family(AmbientSpace.round_sphere_complex(n)))
    return fams
