"""The eight ambient space models and their primitive operations.

Each space is a flat complex vector space C^m (possibly with a
semi-Euclidean metric) or one of the two unit constraint surfaces inside
it: the sphere <z,z> = 1 or the pseudosphere <<z,z>> = -1.  Quaternionic
kinds use the row-major flattening of C^{2 x n}, so the timelike first
column of the indefinite quaternionic metric occupies complex coordinates
1 and n+1.

Quotient spaces (complex/quaternionic projective and hyperbolic spaces)
are never charted here; everything is computed upstairs on the sphere or
pseudosphere with group-invariant data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import (
    ActionMismatch,
    DimensionMismatch,
    OffManifold,
    RetractUndefined,
)

__all__ = [
    "SpaceKind",
    "AmbientSpace",
    "TangentVector",
    "GroupElement",
    "inner",
    "constraint_residual",
    "random_point",
    "tangent_project",
    "retract",
    "group_act",
    "random_group",
    "to_complex",
    "from_complex",
]

ON_MANIFOLD_TOL = 1e-8
# margin on <<z,z>> when sampling indefinite domains, keeps points off the null cone
_NULL_CONE_MARGIN = 0.1


class SpaceKind(str, Enum):
    FLAT_COMPLEX = "flat-complex"
    FLAT_COMPLEX_INDEFINITE = "flat-complex-1"
    FLAT_QUATERNIONIC = "flat-quaternionic"
    FLAT_QUATERNIONIC_INDEFINITE = "flat-quaternionic-1"
    SPHERE_COMPLEX = "sphere-complex"
    PSEUDOSPHERE_COMPLEX = "pseudosphere-complex"
    SPHERE_QUATERNIONIC = "sphere-quaternionic"
    PSEUDOSPHERE_QUATERNIONIC = "pseudosphere-quaternionic"


_QUATERNIONIC = {
    SpaceKind.FLAT_QUATERNIONIC,
    SpaceKind.FLAT_QUATERNIONIC_INDEFINITE,
    SpaceKind.SPHERE_QUATERNIONIC,
    SpaceKind.PSEUDOSPHERE_QUATERNIONIC,
}
_INDEFINITE = {
    SpaceKind.FLAT_COMPLEX_INDEFINITE,
    SpaceKind.FLAT_QUATERNIONIC_INDEFINITE,
    SpaceKind.PSEUDOSPHERE_COMPLEX,
    SpaceKind.PSEUDOSPHERE_QUATERNIONIC,
}
_SPHERES = {SpaceKind.SPHERE_COMPLEX, SpaceKind.SPHERE_QUATERNIONIC}
_PSEUDOSPHERES = {SpaceKind.PSEUDOSPHERE_COMPLEX, SpaceKind.PSEUDOSPHERE_QUATERNIONIC}

_DUAL_KIND = {
    SpaceKind.FLAT_COMPLEX: SpaceKind.FLAT_COMPLEX_INDEFINITE,
    SpaceKind.FLAT_COMPLEX_INDEFINITE: SpaceKind.FLAT_COMPLEX,
    SpaceKind.FLAT_QUATERNIONIC: SpaceKind.FLAT_QUATERNIONIC_INDEFINITE,
    SpaceKind.FLAT_QUATERNIONIC_INDEFINITE: SpaceKind.FLAT_QUATERNIONIC,
    SpaceKind.SPHERE_COMPLEX: SpaceKind.PSEUDOSPHERE_COMPLEX,
    SpaceKind.PSEUDOSPHERE_COMPLEX: SpaceKind.SPHERE_COMPLEX,
    SpaceKind.SPHERE_QUATERNIONIC: SpaceKind.PSEUDOSPHERE_QUATERNIONIC,
    SpaceKind.PSEUDOSPHERE_QUATERNIONIC: SpaceKind.SPHERE_QUATERNIONIC,
}


@dataclass(frozen=True)
class AmbientSpace:
    """One of the eight ambient space models.

    ``m`` is the number of complex coordinates (embedding dimension 2m real),
    ``n`` the size parameter used by the constructors: complex kinds have
    m = 2n, quaternionic kinds are C^{2 x n} with m = 2n as well.  Spheres
    built with ``round_sphere_complex`` may have any m >= 2 (m = n there).
    """

    kind: SpaceKind
    n: int
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("need at least two complex coordinates")

    # -- constructors ------------------------------------------------------

    @classmethod
    def flat_complex(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.FLAT_COMPLEX, n, 2 * n)

    @classmethod
    def flat_complex_indefinite(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.FLAT_COMPLEX_INDEFINITE, n, 2 * n)

    @classmethod
    def flat_quaternionic(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.FLAT_QUATERNIONIC, n, 2 * n)

    @classmethod
    def flat_quaternionic_indefinite(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.FLAT_QUATERNIONIC_INDEFINITE, n, 2 * n)

    @classmethod
    def sphere_complex(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.SPHERE_COMPLEX, n, 2 * n)

    @classmethod
    def pseudosphere_complex(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.PSEUDOSPHERE_COMPLEX, n, 2 * n)

    @classmethod
    def sphere_quaternionic(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.SPHERE_QUATERNIONIC, n, 2 * n)

    @classmethod
    def pseudosphere_quaternionic(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.PSEUDOSPHERE_QUATERNIONIC, n, 2 * n)

    @classmethod
    def round_sphere_complex(cls, m: int) -> "AmbientSpace":
        """Unit sphere S^{2m-1} in C^m, m arbitrary (not tied to m = 2n)."""
        return cls(SpaceKind.SPHERE_COMPLEX, m, m)

    # -- structure ---------------------------------------------------------

    @property
    def embedding_dim(self) -> int:
        return 2 * self.m

    @property
    def is_quaternionic(self) -> bool:
        return self.kind in _QUATERNIONIC

    @property
    def is_indefinite(self) -> bool:
        return self.kind in _INDEFINITE

    @property
    def is_sphere(self) -> bool:
        return self.kind in _SPHERES

    @property
    def is_pseudosphere(self) -> bool:
        return self.kind in _PSEUDOSPHERES

    @property
    def is_curved(self) -> bool:
        return self.is_sphere or self.is_pseudosphere

    @property
    def is_flat(self) -> bool:
        return not self.is_curved

    @property
    def ncols(self) -> int:
        """Number of quaternionic columns (C^{2 x ncols})."""
        if not self.is_quaternionic:
            raise ValueError("not a quaternionic space")
        return self.m // 2

    @cached_property
    def signature(self) -> tuple:
        """Metric sign per complex coordinate."""
        signs = [1] * self.m
        if self.is_indefinite:
            if self.is_quaternionic:
                signs[0] = -1
                signs[self.ncols] = -1
            else:
                signs[0] = -1
        return tuple(signs)

    @cached_property
    def real_signature(self) -> np.ndarray:
        """Metric sign per real coordinate (each complex sign twice)."""
        eta = np.repeat(np.asarray(self.signature, dtype=float), 2)
        eta.flags.writeable = False
        return eta

    @property
    def constraint_value(self) -> float:
        """Target of <.,.>(z,z) on the constraint surface."""
        if self.is_sphere:
            return 1.0
        if self.is_pseudosphere:
            return -1.0
        raise ValueError("flat spaces carry no constraint")

    @property
    def dim(self) -> int:
        """Manifold dimension (2m flat, 2m - 1 on the constraint surfaces)."""
        return self.embedding_dim - (1 if self.is_curved else 0)

    def dual(self) -> "AmbientSpace":
        """Partner space under the definite <-> indefinite correspondence."""
        return AmbientSpace(_DUAL_KIND[self.kind], self.n, self.m)

    @property
    def label(self) -> str:
        return f"{self.kind.value}:n={self.n}"

    def column_pair(self, c: int) -> tuple:
        """Complex coordinate indices (1-based) of quaternionic column c."""
        return (c, self.ncols + c)


@dataclass(frozen=True)
class TangentVector:
    """A direction attached to a base point, tangent to the space there."""

    base: np.ndarray
    dir: np.ndarray


@dataclass(frozen=True)
class GroupElement:
    """Circle or unit-quaternion group element.

    ``kind`` is "s1" (parameter theta) or "s3" (unit quaternion as 4 reals,
    basis 1, i, j, k).
    """

    kind: str
    theta: float = 0.0
    quat: tuple = (1.0, 0.0, 0.0, 0.0)

    @classmethod
    def s1(cls, theta: float) -> "GroupElement":
        return cls("s1", theta=float(theta))

    @classmethod
    def s3(cls, quat) -> "GroupElement":
        q = np.asarray(quat, dtype=float)
        if q.shape != (4,):
            raise ValueError("quaternion needs 4 real components")
        norm = float(np.linalg.norm(q))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"quaternion norm {norm} is not 1 within 1e-12")
        return cls("s3", quat=tuple(q))


# ---------------------------------------------------------------------------
# coordinate views


def to_complex(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[0::2] + 1j * x[1::2]


def from_complex(zv) -> np.ndarray:
    zv = np.asarray(zv, dtype=complex)
    out = np.empty(2 * zv.shape[0], dtype=float)
    out[0::2] = zv.real
    out[1::2] = zv.imag
    return out


# ---------------------------------------------------------------------------
# metric, sampling, projection, retraction


def _check_dim(space: AmbientSpace, v: np.ndarray):
    if v.shape != (space.embedding_dim,):
        raise DimensionMismatch(
            f"expected vector of length {space.embedding_dim}, got shape {v.shape}"
        )


def inner(space: AmbientSpace, v, w) -> float:
    """Metric inner product of two real vectors under the space signature."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    _check_dim(space, v)
    _check_dim(space, w)
    return float(np.dot(space.real_signature * v, w))


def constraint_residual(space: AmbientSpace, p) -> float:
    """Signed deviation of <z,z> (resp. <<z,z>>) from the constraint target."""
    if space.is_flat:
        return 0.0
    return inner(space, p, p) - space.constraint_value


def _on_manifold(space: AmbientSpace, p) -> bool:
    return abs(constraint_residual(space, p)) <= ON_MANIFOLD_TOL


def _as_rng(rng_or_seed) -> np.random.Generator:
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return np.random.default_rng(rng_or_seed)


def _gaussian_in_cone(space: AmbientSpace, rng: np.random.Generator) -> np.ndarray:
    """Gaussian sample conditioned on <<x,x>> < -margin.

    The timelike block gets a boosted standard deviation so the acceptance
    probability stays O(1) for every signature; without the boost the
    quaternionic cone has vanishing Gaussian mass.
    """
    eta = space.real_signature
    n_time = int(np.sum(eta < 0))
    n_space = eta.shape[0] - n_time
    boost = np.where(eta < 0, np.sqrt(max(n_space, 1) / n_time), 1.0)
    for _ in range(10_000):
        x = rng.standard_normal(space.embedding_dim) * boost
        if inner(space, x, x) < -_NULL_CONE_MARGIN:
            return x
    raise RuntimeError("cone rejection sampling exhausted its retry budget")


def random_point(space: AmbientSpace, rng_or_seed=0) -> np.ndarray:
    """Random point of the space, exactly on the constraint, seeded.

    Flat definite kinds: standard Gaussian.  Flat indefinite kinds: Gaussian
    conditioned on <<z,z>> < 0 (the open domain the fields live on).  Sphere:
    normalized Gaussian.  Pseudosphere: conditioned Gaussian scaled so that
    <<z,z>> = -1.
    """
    rng = _as_rng(rng_or_seed)
    if space.is_sphere:
        while True:
            x = rng.standard_normal(space.embedding_dim)
            norm = np.linalg.norm(x)
            if norm > 1e-6:
                return x / norm
    if space.is_pseudosphere:
        x = _gaussian_in_cone(space, rng)
        return x / np.sqrt(-inner(space, x, x))
    if space.is_indefinite:
        return _gaussian_in_cone(space, rng)
    return rng.standard_normal(space.embedding_dim)


def tangent_project(space: AmbientSpace, p, v) -> TangentVector:
    """Metric-orthogonal projection of ``v`` onto the tangent space at ``p``."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_dim(space, p)
    _check_dim(space, v)
    if space.is_flat:
        return TangentVector(p, v.copy())
    if not _on_manifold(space, p):
        raise OffManifold(f"constraint residual {constraint_residual(space, p):.3e} exceeds {ON_MANIFOLD_TOL}")
    # <<p,p>> = +-1, so the projector is v - <<v,p>> p / <<p,p>>
    coeff = inner(space, v, p) / space.constraint_value
    return TangentVector(p, v - coeff * p)


def retract(space: AmbientSpace, x) -> np.ndarray:
    """Rescale ``x`` back onto the constraint surface (identity on flat kinds)."""
    x = np.asarray(x, dtype=float)
    _check_dim(space, x)
    if space.is_flat:
        return x.copy()
    q = inner(space, x, x)
    if space.is_sphere:
        if q <= 0:
            raise RetractUndefined("cannot retract the zero vector onto the sphere")
        return x / np.sqrt(q)
    if q >= 0:
        raise RetractUndefined(f"<<x,x>> = {q:.3e} is not negative, point is outside the cone")
    return x / np.sqrt(-q)


# ---------------------------------------------------------------------------
# group actions


def _act_s1(theta: float, p: np.ndarray) -> np.ndarray:
    zv = to_complex(p) * np.exp(1j * theta)
    return from_complex(zv)


def _act_s3(space: AmbientSpace, quat, p: np.ndarray) -> np.ndarray:
    # right multiplication by q = a + b j on each column (z1 + z2 j):
    # z1' = a z1 - conj(b) z2,  z2' = b z1 + conj(a) z2
    a = complex(quat[0], quat[1])
    b = complex(quat[2], quat[3])
    zv = to_complex(p)
    ncols = space.ncols
    z1 = zv[:ncols]
    z2 = zv[ncols:]
    out = np.empty_like(zv)
    out[:ncols] = a * z1 - np.conj(b) * z2
    out[ncols:] = b * z1 + np.conj(a) * z2
    return from_complex(out)


def group_act(space: AmbientSpace, g: GroupElement, p) -> np.ndarray:
    """Apply the space's isometric group action to a point."""
    p = np.asarray(p, dtype=float)
    _check_dim(space, p)
    if g.kind == "s1":
        if space.kind not in (SpaceKind.SPHERE_COMPLEX, SpaceKind.PSEUDOSPHERE_COMPLEX):
            raise ActionMismatch("the circle action lives on the complex sphere kinds")
        return _act_s1(g.theta, p)
    if g.kind == "s3":
        if space.kind not in (SpaceKind.SPHERE_QUATERNIONIC, SpaceKind.PSEUDOSPHERE_QUATERNIONIC):
            raise ActionMismatch("the unit-quaternion action lives on the quaternionic sphere kinds")
        return _act_s3(space, g.quat, p)
    raise ActionMismatch(f"unknown group element kind {g.kind!r}")


def random_group(space: AmbientSpace, rng_or_seed=0) -> GroupElement:
    """Uniform random element of the group acting on this space kind."""
    rng = _as_rng(rng_or_seed)
    if space.is_quaternionic:
        q = rng.standard_normal(4)
        return GroupElement.s3(q / np.linalg.norm(q))
    return GroupElement.s1(rng.uniform(0.0, 2.0 * np.pi))
