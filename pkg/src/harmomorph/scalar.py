"""Closed-form complex scalar fields with exact second-order differentiation.

A field is an immutable expression tree over the complex coordinates of C^m
and their conjugates.  All differentiation happens over real coordinates
with the fixed flattening convention used everywhere in this package:

    point of C^m  <->  (x_1, y_1, x_2, y_2, ..., x_m, y_m),  z_j = x_j + i y_j

Matrix coordinate spaces C^{2 x n} are flattened row-major, so the matrix
entry in row r, column c is complex coordinate (r - 1) * n + c.

``evaluate_jet2`` returns the exact value, real-direction gradient and
real-direction Hessian of a field at a point (structural differentiation,
no truncation error).  Wirtinger derivatives are linear contractions of the
real jet and are exposed through ``wirtinger_view``.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np

from .errors import DimensionMismatch, DivisionByZero

__all__ = [
    "ScalarField",
    "Coord",
    "ConjCoord",
    "Const",
    "Sum",
    "Product",
    "Power",
    "Quotient",
    "InnerSquare",
    "Jet2",
    "WirtingerView",
    "z",
    "zbar",
    "const",
    "inner_square",
    "conjugate",
    "evaluate_value",
    "evaluate_jet1",
    "evaluate_jet2",
    "wirtinger_view",
]


# ---------------------------------------------------------------------------
# second-order jets


@dataclass
class Jet2:
    """Exact 2-jet of a complex field over 2m real coordinates.

    ``grad[a]`` is the partial derivative in real direction a, ``hess`` the
    symmetric matrix of second partials.  Symmetry is preserved exactly by
    every operation below, it is never re-symmetrized.
    """

    value: complex
    grad: np.ndarray
    hess: np.ndarray

    @property
    def dim(self) -> int:
        return self.grad.shape[0]

    def __add__(self, other: "Jet2") -> "Jet2":
        return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.grad, -self.hess)

    def __mul__(self, other: "Jet2") -> "Jet2":
        cross = np.outer(self.grad, other.grad)
        # symmetrize the rank-two term first so hess stays exactly symmetric
        sym = cross + cross.T
        return Jet2(
            self.value * other.value,
            self.value * other.grad + other.value * self.grad,
            (self.value * other.hess + other.value * self.hess) + sym,
        )

    def __truediv__(self, other: "Jet2") -> "Jet2":
        q = self.value / other.value
        grad = (self.grad - q * other.grad) / other.value
        cross = np.outer(grad, other.grad)
        sym = cross + cross.T
        hess = ((self.hess - q * other.hess) - sym) / other.value
        return Jet2(q, grad, hess)

    def scaled(self, c: complex) -> "Jet2":
        return Jet2(c * self.value, c * self.grad, c * self.hess)

    def power(self, k: int) -> "Jet2":
        if k == 1:
            return Jet2(self.value, self.grad.copy(), self.hess.copy())
        v = self.value
        # v ** 0 == 1 also at v == 0; the jet of a polynomial node is polynomial.
        vk2 = v ** (k - 2)
        vk1 = vk2 * v
        outer = np.outer(self.grad, self.grad)
        return Jet2(
            vk1 * v,
            k * vk1 * self.grad,
            k * vk1 * self.hess + k * (k - 1) * vk2 * outer,
        )

    def conjugated(self) -> "Jet2":
        return Jet2(np.conj(self.value), np.conj(self.grad), np.conj(self.hess))


def _const_jet(value: complex, dim: int) -> Jet2:
    return Jet2(complex(value), np.zeros(dim, dtype=complex), np.zeros((dim, dim), dtype=complex))


# ---------------------------------------------------------------------------
# expression nodes


@dataclass(frozen=True)
class ScalarField:
    """Base class for field expression nodes.

    Nodes are immutable and safe to share between threads; arithmetic
    operators build new trees.
    """

    def __add__(self, other) -> "ScalarField":
        return _sum(self, _coerce(other))

    def __radd__(self, other) -> "ScalarField":
        return _sum(_coerce(other), self)

    def __sub__(self, other) -> "ScalarField":
        return _sum(self, _coerce(other).scaled(-1))

    def __rsub__(self, other) -> "ScalarField":
        return _sum(_coerce(other), self.scaled(-1))

    def __mul__(self, other) -> "ScalarField":
        return _product(self, _coerce(other))

    def __rmul__(self, other) -> "ScalarField":
        return _product(_coerce(other), self)

    def __truediv__(self, other) -> "ScalarField":
        return Quotient(self, _coerce(other))

    def __rtruediv__(self, other) -> "ScalarField":
        return Quotient(_coerce(other), self)

    def __pow__(self, k: int) -> "ScalarField":
        return Power(self, k)

    def __neg__(self) -> "ScalarField":
        return self.scaled(-1)

    def scaled(self, c) -> "ScalarField":
        return _product(Const(complex(c)), self)

    def conj(self) -> "ScalarField":
        return conjugate(self)


@dataclass(frozen=True)
class Coord(ScalarField):
    """Complex coordinate z_j (1-based index)."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("coordinate index is 1-based")


@dataclass(frozen=True)
class ConjCoord(ScalarField):
    """Conjugate coordinate conj(z_j) (1-based index)."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("coordinate index is 1-based")


@dataclass(frozen=True)
class Const(ScalarField):
    value: complex


@dataclass(frozen=True)
class Sum(ScalarField):
    terms: tuple


@dataclass(frozen=True)
class Product(ScalarField):
    factors: tuple


@dataclass(frozen=True)
class Power(ScalarField):
    """Integer power with exponent >= 1; reciprocals go through Quotient."""

    base: ScalarField
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or self.exponent < 1:
            raise ValueError("Power exponent must be an integer >= 1")


@dataclass(frozen=True)
class Quotient(ScalarField):
    num: ScalarField
    den: ScalarField


@dataclass(frozen=True)
class InnerSquare(ScalarField):
    """The real quadratic form sum_k s_k |z_k|^2 with one sign per coordinate.

    With all signs +1 this is <z,z>; flipping signs gives the semi-Euclidean
    form <<z,z>>.  The length of ``signs`` pins the coordinate count m.
    """

    signs: tuple

    def __post_init__(self):
        if not self.signs or any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be a nonempty tuple of +-1")


def _coerce(obj) -> ScalarField:
    if isinstance(obj, ScalarField):
        return obj
    if isinstance(obj, Number):
        return Const(complex(obj))
    raise TypeError(f"cannot use {type(obj).__name__} as a scalar field")


def _sum(a: ScalarField, b: ScalarField) -> Sum:
    terms = ()
    for t in (a, b):
        terms += t.terms if isinstance(t, Sum) else (t,)
    return Sum(terms)


def _product(a: ScalarField, b: ScalarField) -> Product:
    factors = ()
    for f in (a, b):
        factors += f.factors if isinstance(f, Product) else (f,)
    return Product(factors)


def z(j: int) -> Coord:
    """Complex coordinate z_j (1-based)."""
    return Coord(j)


def zbar(j: int) -> ConjCoord:
    """Conjugate coordinate conj(z_j) (1-based)."""
    return ConjCoord(j)


def const(c) -> Const:
    return Const(complex(c))


def inner_square(signs_or_m) -> InnerSquare:
    """Quadratic form node; pass m for the definite form, or a sign tuple."""
    if isinstance(signs_or_m, int):
        return InnerSquare((1,) * signs_or_m)
    return InnerSquare(tuple(signs_or_m))


def conjugate(field: ScalarField) -> ScalarField:
    """Structural conjugate: swaps z_j <-> conj(z_j) and conjugates constants."""
    match field:
        case Coord(index=j):
            return ConjCoord(j)
        case ConjCoord(index=j):
            return Coord(j)
        case Const(value=c):
            return Const(complex(c).conjugate())
        case Sum(terms=ts):
            return Sum(tuple(conjugate(t) for t in ts))
        case Product(factors=fs):
            return Product(tuple(conjugate(f) for f in fs))
        case Power(base=b, exponent=k):
            return Power(conjugate(b), k)
        case Quotient(num=n, den=d):
            return Quotient(conjugate(n), conjugate(d))
        case InnerSquare():
            return field
        case _:
            raise TypeError(f"unknown node {type(field).__name__}")


# ---------------------------------------------------------------------------
# evaluation


def evaluate_jet2(field: ScalarField, point) -> Jet2:
    """Exact 2-jet of ``field`` at the real coordinate vector ``point``.

    Raises DivisionByZero when a quotient denominator vanishes at the point
    and DimensionMismatch when the point length is odd or a coordinate index
    is out of range.
    """
    x = np.asarray(point, dtype=float)
    if x.ndim != 1 or x.shape[0] % 2 != 0:
        raise DimensionMismatch(f"point must be a flat vector of even length, got shape {x.shape}")
    return _jet(field, x)


def _jet(field: ScalarField, x: np.ndarray) -> Jet2:
    dim = x.shape[0]
    match field:
        case Coord(index=j) | ConjCoord(index=j):
            if 2 * j > dim:
                raise DimensionMismatch(f"coordinate z_{j} out of range for {dim // 2} coordinates")
            s = 1.0 if isinstance(field, Coord) else -1.0
            grad = np.zeros(dim, dtype=complex)
            grad[2 * j - 2] = 1.0
            grad[2 * j - 1] = s * 1j
            return Jet2(complex(x[2 * j - 2], s * x[2 * j - 1]), grad, np.zeros((dim, dim), dtype=complex))
        case Const(value=c):
            return _const_jet(c, dim)
        case Sum(terms=ts):
            acc = _const_jet(0.0, dim)
            for t in ts:
                acc = acc + _jet(t, x)
            return acc
        case Product(factors=fs):
            acc = _jet(fs[0], x)
            for f in fs[1:]:
                acc = acc * _jet(f, x)
            return acc
        case Power(base=b, exponent=k):
            return _jet(b, x).power(k)
        case Quotient(num=n, den=d):
            dj = _jet(d, x)
            if dj.value == 0:
                raise DivisionByZero(field)
            return _jet(n, x) / dj
        case InnerSquare(signs=signs):
            if 2 * len(signs) != dim:
                raise DimensionMismatch(f"inner product over {len(signs)} coordinates applied to {dim // 2}")
            eta = np.repeat(np.asarray(signs, dtype=float), 2)
            grad = (2.0 * eta * x).astype(complex)
            return Jet2(complex(np.dot(eta * x, x)), grad, np.diag(2.0 * eta).astype(complex))
        case _:
            raise TypeError(f"unknown node {type(field).__name__}")


def evaluate_value(field: ScalarField, point) -> complex:
    """Value of the field only; cheaper than the full jet."""
    x = np.asarray(point, dtype=float)
    return _value(field, x)


def _value(field: ScalarField, x: np.ndarray) -> complex:
    match field:
        case Coord(index=j):
            return complex(x[2 * j - 2], x[2 * j - 1])
        case ConjCoord(index=j):
            return complex(x[2 * j - 2], -x[2 * j - 1])
        case Const(value=c):
            return complex(c)
        case Sum(terms=ts):
            return sum((_value(t, x) for t in ts), 0j)
        case Product(factors=fs):
            acc = 1 + 0j
            for f in fs:
                acc *= _value(f, x)
            return acc
        case Power(base=b, exponent=k):
            return _value(b, x) ** k
        case Quotient(num=n, den=d):
            dv = _value(d, x)
            if dv == 0:
                raise DivisionByZero(field)
            return _value(n, x) / dv
        case InnerSquare(signs=signs):
            eta = np.repeat(np.asarray(signs, dtype=float), 2)
            return complex(np.dot(eta * x, x))
        case _:
            raise TypeError(f"unknown node {type(field).__name__}")


def evaluate_jet1(field: ScalarField, point):
    """(value, gradient) of the field; skips the Hessian work of the 2-jet."""
    x = np.asarray(point, dtype=float)
    return _jet1(field, x)


def _jet1(field: ScalarField, x: np.ndarray):
    dim = x.shape[0]
    match field:
        case Coord(index=j) | ConjCoord(index=j):
            s = 1.0 if isinstance(field, Coord) else -1.0
            grad = np.zeros(dim, dtype=complex)
            grad[2 * j - 2] = 1.0
            grad[2 * j - 1] = s * 1j
            return complex(x[2 * j - 2], s * x[2 * j - 1]), grad
        case Const(value=c):
            return complex(c), np.zeros(dim, dtype=complex)
        case Sum(terms=ts):
            v = 0j
            g = np.zeros(dim, dtype=complex)
            for t in ts:
                tv, tg = _jet1(t, x)
                v += tv
                g += tg
            return v, g
        case Product(factors=fs):
            v, g = _jet1(fs[0], x)
            for f in fs[1:]:
                fv, fg = _jet1(f, x)
                g = v * fg + fv * g
                v = v * fv
            return v, g
        case Power(base=b, exponent=k):
            v, g = _jet1(b, x)
            return v**k, k * v ** (k - 1) * g
        case Quotient(num=n, den=d):
            dv, dg = _jet1(d, x)
            if dv == 0:
                raise DivisionByZero(field)
            nv, ng = _jet1(n, x)
            q = nv / dv
            return q, (ng - q * dg) / dv
        case InnerSquare(signs=signs):
            eta = np.repeat(np.asarray(signs, dtype=float), 2)
            return complex(np.dot(eta * x, x)), (2.0 * eta * x).astype(complex)
        case _:
            raise TypeError(f"unknown node {type(field).__name__}")


# ---------------------------------------------------------------------------
# Wirtinger contractions


@dataclass
class WirtingerView:
    """Wirtinger derivatives d/dz_k, d/dzbar_k and the mixed second block."""

    dz: np.ndarray
    dzbar: np.ndarray
    dzdzbar: np.ndarray


def wirtinger_view(jet: Jet2, m: int) -> WirtingerView:
    """Contract a real 2-jet over C^m into Wirtinger form.

    dz_k = (d/dx_k - i d/dy_k)/2, dzbar_k = (d/dx_k + i d/dy_k)/2 and
    dzdzbar[j, k] = d^2/dz_j dzbar_k.
    """
    if jet.dim != 2 * m:
        raise DimensionMismatch(f"jet has {jet.dim} real directions, expected {2 * m}")
    gx = jet.grad[0::2]
    gy = jet.grad[1::2]
    hxx = jet.hess[0::2, 0::2]
    hyy = jet.hess[1::2, 1::2]
    hxy = jet.hess[0::2, 1::2]
    # rows differentiate in z_j, columns in zbar_k; hxy[j, k] = d^2/dx_j dy_k
    mixed = 0.25 * (hxx + hyy + 1j * (hxy - hxy.T))
    return WirtingerView(0.5 * (gx - 1j * gy), 0.5 * (gx + 1j * gy), mixed)
