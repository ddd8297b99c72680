"""Complex quaternions (biquaternions) H(C).

A biquaternion is ``q = q0 + q1 i1 + q2 i2 + q3 i3`` with complex ``q_k``.
:class:`Biquaternion` stores the coefficients in a read-only complex array
whose last axis has length 4 (order ``q0, q1, q2, q3``), so one instance may
hold a whole batch of values and every operation broadcasts like numpy.

The algebra has zero divisors, e.g. ``(i1 + 1j*i2)**2 == 0``, so no
division by biquaternions is offered.
"""
from __future__ import annotations

import numbers

import numpy as np

from .errors import ContractViolation

__all__ = [
    "Biquaternion",
    "ONE",
    "I1",
    "I2",
    "I3",
    "BASIS",
    "MULTIPLICATION_TABLE",
    "mul",
    "mul_table",
    "dot",
    "cross",
    "left_mul",
    "right_mul",
    "dot_via_anticommutator",
    "as_vec3",
    "from_vec3",
]

# i_a * i_b = sign * i_c, stored as TABLE[a][b] = (sign, c)
MULTIPLICATION_TABLE = (
    ((1, 0), (1, 1), (1, 2), (1, 3)),
    ((1, 1), (-1, 0), (1, 3), (-1, 2)),
    ((1, 2), (-1, 3), (-1, 0), (1, 1)),
    ((1, 3), (1, 2), (-1, 1), (-1, 0)),
)


class Biquaternion:
    """Immutable (batch of) complex quaternion(s).

    Parameters
    ----------
    q0, q1, q2, q3 : complex or array_like
        Coefficients of ``1, i1, i2, i3``. Arrays are broadcast together.

    Examples
    --------
    >>> I1 * I2 == I3
    True
    >>> (2 + 3 * I1) * (2 - 3 * I1)
    Biquaternion((13+0j), 0j, 0j, 0j)
    """

    __slots__ = ("_c",)
    __array_ufunc__ = None  # make ndarray * Biquaternion defer to __rmul__

    def __init__(self, q0=0, q1=0, q2=0, q3=0):
        parts = np.broadcast_arrays(*(np.asarray(q, dtype=complex) for q in (q0, q1, q2, q3)))
        self._set(np.stack(parts, axis=-1))

    def _set(self, coeffs):
        coeffs = np.array(coeffs, dtype=complex, copy=True)
        coeffs.setflags(write=False)
        object.__setattr__(self, "_c", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("Biquaternion is immutable")

    @classmethod
    def from_array(cls, coeffs) -> "Biquaternion":
        """Wrap an array whose last axis holds ``(q0, q1, q2, q3)``."""
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape[-1:] != (4,):
            raise ValueError(f"last axis must have length 4, got shape {coeffs.shape}")
        obj = cls.__new__(cls)
        obj._set(coeffs)
        return obj

    @classmethod
    def from_parts(cls, scalar, vector) -> "Biquaternion":
        vector = np.asarray(vector, dtype=complex)
        scalar = np.broadcast_to(np.asarray(scalar, dtype=complex), vector.shape[:-1])
        return cls(scalar, vector[..., 0], vector[..., 1], vector[..., 2])

    @classmethod
    def from_real(cls, values) -> "Biquaternion":
        """Inverse of :meth:`to_real` (interleaved ``re, im`` per component)."""
        values = np.asarray(values, dtype=float)
        if values.shape[-1:] != (8,):
            raise ValueError("interleaved form needs a last axis of length 8")
        return cls.from_array(values[..., 0::2] + 1j * values[..., 1::2])

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def shape(self):
        return self._c.shape[:-1]

    q0 = property(lambda self: self._c[..., 0])
    q1 = property(lambda self: self._c[..., 1])
    q2 = property(lambda self: self._c[..., 2])
    q3 = property(lambda self: self._c[..., 3])

    @property
    def scalar(self) -> np.ndarray:
        """Complex scalar part ``q0``."""
        return self._c[..., 0]

    @property
    def vector(self) -> np.ndarray:
        """Vector part as a ``(..., 3)`` complex array."""
        return self._c[..., 1:]

    def scalar_part(self) -> "Biquaternion":
        c = np.zeros_like(self._c)
        c[..., 0] = self._c[..., 0]
        return Biquaternion.from_array(c)

    def vector_part(self) -> "Biquaternion":
        c = self._c.copy()
        c[..., 0] = 0
        return Biquaternion.from_array(c)

    def is_vector(self, atol: float = 0.0):
        """True where the scalar part vanishes (purely vectorial)."""
        return np.abs(self._c[..., 0]) <= atol

    def conj(self) -> "Biquaternion":
        """Quaternionic conjugate ``q0 - q_vec`` (coefficients are not conjugated)."""
        c = -self._c
        c[..., 0] = self._c[..., 0]
        return Biquaternion.from_array(c)

    def norm_inf(self) -> np.ndarray:
        """Max over the 8 real components, per batch element."""
        return np.maximum(np.abs(self._c.real), np.abs(self._c.imag)).max(axis=-1)

    def to_real(self) -> np.ndarray:
        out = np.empty(self._c.shape[:-1] + (8,))
        out[..., 0::2] = self._c.real
        out[..., 1::2] = self._c.imag
        return out

    def __getitem__(self, index) -> "Biquaternion":
        if not isinstance(index, tuple):
            index = (index,)
        return Biquaternion.from_array(self._c[index + (Ellipsis, slice(None))])

    def __len__(self):
        if not self.shape:
            raise TypeError("scalar Biquaternion has no len()")
        return self.shape[0]

    def __eq__(self, other):
        if isinstance(other, numbers.Number):
            other = Biquaternion(other)
        if not isinstance(other, Biquaternion):
            return NotImplemented
        return bool(np.array_equal(*np.broadcast_arrays(self._c, other._c)))

    __hash__ = None

    def __neg__(self):
        return Biquaternion.from_array(-self._c)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Biquaternion.from_array(self._c + other._c)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Biquaternion.from_array(self._c - other._c)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Biquaternion.from_array(other._c - self._c)

    def __mul__(self, other):
        if isinstance(other, Biquaternion):
            return mul(self, other)
        if _is_scalar_like(other):
            return Biquaternion.from_array(self._c * np.asarray(other, dtype=complex)[..., None])
        return NotImplemented

    def __rmul__(self, other):
        # complex scalars commute with every biquaternion
        if _is_scalar_like(other):
            return Biquaternion.from_array(self._c * np.asarray(other, dtype=complex)[..., None])
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Biquaternion):
            raise TypeError("biquaternions have zero divisors; division is not provided")
        if _is_scalar_like(other):
            return Biquaternion.from_array(self._c / np.asarray(other, dtype=complex)[..., None])
        return NotImplemented

    def __repr__(self):
        if self._c.ndim == 1:
            return "Biquaternion({!r}, {!r}, {!r}, {!r})".format(*(complex(c) for c in self._c))
        return f"Biquaternion(shape={self.shape})"


def _is_scalar_like(obj):
    return isinstance(obj, numbers.Number) or (
        isinstance(obj, np.ndarray) and obj.dtype.kind in "biufc"
    )


def _coerce(obj):
    if isinstance(obj, Biquaternion):
        return obj
    if _is_scalar_like(obj):
        return Biquaternion(obj)
    return None


ONE = Biquaternion(1)
I1 = Biquaternion(0, 1)
I2 = Biquaternion(0, 0, 1)
I3 = Biquaternion(0, 0, 0, 1)
BASIS = (ONE, I1, I2, I3)


def _components(q):
    c = q.coeffs if isinstance(q, Biquaternion) else np.asarray(q, dtype=complex)
    return c[..., 0], c[..., 1], c[..., 2], c[..., 3]


def _cross3(a1, a2, a3, b1, b2, b3):
    return a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1


def mul(p, q) -> Biquaternion:
    """Product ``p q = p0 q0 - <p,q> + [p x q] + p0 q_vec + q0 p_vec``."""
    p0, p1, p2, p3 = _components(p)
    q0, q1, q2, q3 = _components(q)
    c1, c2, c3 = _cross3(p1, p2, p3, q1, q2, q3)
    s = p0 * q0 - (p1 * q1 + p2 * q2 + p3 * q3)
    return Biquaternion(
        s,
        c1 + p0 * q1 + q0 * p1,
        c2 + p0 * q2 + q0 * p2,
        c3 + p0 * q3 + q0 * p3,
    )


def mul_table(p, q) -> Biquaternion:
    """Product by direct expansion over the basis multiplication table.

    Independent of :func:`mul`; used to cross-check the vector formula.
    """
    pc = p.coeffs if isinstance(p, Biquaternion) else np.asarray(p, dtype=complex)
    qc = q.coeffs if isinstance(q, Biquaternion) else np.asarray(q, dtype=complex)
    shape = np.broadcast_shapes(pc.shape, qc.shape)
    out = np.zeros(shape, dtype=complex)
    for a in range(4):
        for b in range(4):
            sign, c = MULTIPLICATION_TABLE[a][b]
            out[..., c] += sign * pc[..., a] * qc[..., b]
    return Biquaternion.from_array(out)


def as_vec3(q) -> np.ndarray:
    """View a purely vectorial biquaternion as a ``(..., 3)`` complex array.

    Plain arrays with a trailing axis of length 3 pass through unchanged.
    """
    if isinstance(q, Biquaternion):
        if not np.all(q.scalar == 0):
            raise ContractViolation("expected a purely vectorial biquaternion (q0 == 0)")
        return q.vector
    v = np.asarray(q, dtype=complex)
    if v.shape[-1:] != (3,):
        raise ContractViolation(f"expected a vector with trailing axis 3, got shape {v.shape}")
    return v


def from_vec3(v) -> Biquaternion:
    return Biquaternion.from_parts(0, v)


def dot(p, q) -> np.ndarray:
    """Bilinear (non-Hermitian) scalar product ``sum_k p_k q_k`` of vector parts."""
    a, b = as_vec3(p), as_vec3(q)
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]


def cross(p, q):
    """Vector product; returns a Biquaternion if either input is one."""
    a, b = as_vec3(p), as_vec3(q)
    c = np.stack(
        _cross3(a[..., 0], a[..., 1], a[..., 2], b[..., 0], b[..., 1], b[..., 2]), axis=-1
    )
    if isinstance(p, Biquaternion) or isinstance(q, Biquaternion):
        return from_vec3(c)
    return c


def left_mul(p):
    """Operator ``q -> p q``."""
    p = _coerce(p)
    return lambda q: mul(p, q)


def right_mul(p):
    """Operator ``q -> q p``."""
    p = _coerce(p)
    return lambda q: mul(q, p)


def dot_via_anticommutator(p, q) -> np.ndarray:
    """Scalar product from ``-(p q + q p)/2``, which is purely scalar for vectors."""
    pb, qb = from_vec3(as_vec3(p)), from_vec3(as_vec3(q))
    anti = (left_mul(pb)(qb) + right_mul(pb)(qb)) * -0.5
    return anti.scalar
