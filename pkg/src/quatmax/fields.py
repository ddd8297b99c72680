"""Closed-form scalar and biquaternion fields with exact derivative oracles.

A :class:`ScalarField` evaluates to a :class:`Jet` -- value, gradient and
Hessian at a batch of points -- and arithmetic on fields propagates the
jets by the product and chain rules. Nothing is differentiated
numerically here; the finite-difference machinery in :mod:`quatmax.grid`
is kept separate so that the two can check each other.

Points are real arrays with a trailing axis of length 3.
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .biquat import Biquaternion
from .errors import BranchError, ContractViolation, DomainError, MissingOracle, SingularityError

__all__ = [
    "Jet",
    "ScalarField",
    "QuatField",
    "as_points",
    "constant",
    "coordinate",
    "linear",
    "radius",
    "exp",
    "sin",
    "cos",
    "sqrt",
    "reciprocal",
    "partial",
    "from_oracles",
    "ZERO",
    "ONE",
]

SINGULAR_ATOL = 1e-12


def as_points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (3,):
        raise ValueError(f"points need a trailing axis of length 3, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("points must have finite coordinates")
    return x


@dataclass(frozen=True)
class Jet:
    """Value and derivatives of a scalar field at a batch of points.

    ``grad`` has shape ``(..., 3)``; ``hess`` has shape ``(..., 3, 3)``.
    Entries above the requested order are ``None``.
    """

    val: np.ndarray
    grad: Optional[np.ndarray] = None
    hess: Optional[np.ndarray] = None

    @property
    def order(self):
        return 0 if self.grad is None else (1 if self.hess is None else 2)

    def truncate(self, order):
        return Jet(self.val, self.grad if order >= 1 else None, self.hess if order >= 2 else None)


def _opt(fn, *args):
    return None if any(a is None for a in args) else fn(*args)


def _outer(a, b):
    return a[..., :, None] * b[..., None, :]


def _jet_add(a: Jet, b: Jet, sign=1) -> Jet:
    return Jet(
        a.val + sign * b.val,
        _opt(lambda u, v: u + sign * v, a.grad, b.grad),
        _opt(lambda u, v: u + sign * v, a.hess, b.hess),
    )


def _jet_scale(a: Jet, c) -> Jet:
    return Jet(a.val * c, _opt(lambda g: g * c, a.grad), _opt(lambda h: h * c, a.hess))


def _jet_mul(a: Jet, b: Jet) -> Jet:
    val = a.val * b.val
    grad = _opt(lambda ga, gb: ga * b.val[..., None] + a.val[..., None] * gb, a.grad, b.grad)
    hess = _opt(
        lambda ga, gb, ha, hb: ha * b.val[..., None, None]
        + a.val[..., None, None] * hb
        + _outer(ga, gb)
        + _outer(gb, ga),
        a.grad,
        b.grad,
        a.hess,
        b.hess,
    )
    return Jet(val, grad, hess)


def _jet_compose(u: Jet, f0, f1=None, f2=None) -> Jet:
    """Chain rule for ``F(u)`` given ``F, F', F''`` evaluated at ``u.val``."""
    grad = _opt(lambda d1, g: d1[..., None] * g, f1, u.grad)
    hess = _opt(
        lambda d1, d2, g, h: d2[..., None, None] * _outer(g, g) + d1[..., None, None] * h,
        f1,
        f2,
        u.grad,
        u.hess,
    )
    return Jet(f0, grad, hess)


class ScalarField:
    """Complex scalar field on R^3 with exact derivative oracles.

    Parameters
    ----------
    evaluate : callable
        ``evaluate(x, order, cache) -> Jet``; must fill derivatives up to
        ``order``.
    order : int
        Highest derivative order the field can supply (at most 2).
    singular : sequence of points
        Points where the field is undefined. Evaluating within
        ``SINGULAR_ATOL`` of one raises :class:`DomainError`.
    const : complex, optional
        Set for constant fields; enables structural simplification.
    """

    def __init__(self, evaluate: Callable, order: int = 2, singular=(), name=None, const=None):
        self._evaluate = evaluate
        self.order = order
        self.singular = tuple(tuple(float(c) for c in p) for p in singular)
        self.name = name
        self.const = const

    # -- evaluation ------------------------------------------------------
    def _jet(self, x, order, cache) -> Jet:
        if order > self.order:
            raise MissingOracle(
                f"field {self.name or '<anon>'} provides derivatives up to order {self.order}, "
                f"order {order} requested"
            )
        hit = cache.get(id(self))
        if hit is not None and hit.order >= order:
            return hit.truncate(order)
        jet = self._evaluate(x, order, cache)
        cache[id(self)] = jet
        return jet

    def check_domain(self, x):
        check_singular(self.singular, x)

    def jet(self, x, order=2, cache=None) -> Jet:
        x = as_points(x)
        self.check_domain(x)
        return self._jet(x, order, {} if cache is None else cache)

    def value(self, x):
        return self.jet(x, 0).val

    def gradient(self, x):
        return self.jet(x, 1).grad

    def hessian(self, x):
        return self.jet(x, 2).hess

    def laplacian(self, x):
        return np.trace(self.hessian(x), axis1=-2, axis2=-1)

    __call__ = value

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        other = _as_field(other)
        if other is None:
            return NotImplemented
        if self.const == 0:
            return other
        if other.const == 0:
            return self
        if self.const is not None and other.const is not None:
            return constant(self.const + other.const)
        return _binary(self, other, lambda a, b: _jet_add(a, b))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_field(other)
        if other is None:
            return NotImplemented
        if other.const == 0:
            return self
        if self.const is not None and other.const is not None:
            return constant(self.const - other.const)
        return _binary(self, other, lambda a, b: _jet_add(a, b, -1))

    def __rsub__(self, other):
        other = _as_field(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return self * -1

    def __mul__(self, other):
        if isinstance(other, QuatField):
            return NotImplemented
        if isinstance(other, numbers.Number):
            return self._scaled(complex(other))
        other = _as_field(other)
        if other is None:
            return NotImplemented
        if other.const is not None:
            return self._scaled(other.const)
        if self.const is not None:
            return other._scaled(self.const)
        return _binary(self, other, _jet_mul)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return self._scaled(1 / complex(other))
        other = _as_field(other)
        if other is None:
            return NotImplemented
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        other = _as_field(other)
        if other is None:
            return NotImplemented
        return other * reciprocal(self)

    def _scaled(self, c):
        if c == 0:
            return ZERO
        if c == 1:
            return self
        if self.const is not None:
            return constant(self.const * c)
        return ScalarField(
            lambda x, n, cache: _jet_scale(self._jet(x, n, cache), c),
            self.order,
            self.singular,
        )

    def __repr__(self):
        if self.const is not None:
            return f"ScalarField(const={self.const})"
        return f"ScalarField({self.name or '<expr>'}, order={self.order})"


def check_singular(points, x):
    for p in points:
        d = np.linalg.norm(x - np.asarray(p), axis=-1)
        if np.any(d <= SINGULAR_ATOL):
            loc = x.reshape(-1, 3)[int(np.argmin(d.reshape(-1)))]
            raise DomainError(f"evaluation at declared singular point {tuple(loc)}")


def _merge_singular(*fields):
    seen = []
    for f in fields:
        for p in f.singular:
            if p not in seen:
                seen.append(p)
    return seen


def _binary(a, b, op):
    return ScalarField(
        lambda x, n, cache: op(a._jet(x, n, cache), b._jet(x, n, cache)),
        min(a.order, b.order),
        _merge_singular(a, b),
    )


def _as_field(obj):
    if isinstance(obj, ScalarField):
        return obj
    if isinstance(obj, numbers.Number):
        return constant(obj)
    return None


# -- primitive fields ------------------------------------------------------

def constant(c) -> ScalarField:
    c = complex(c)

    def evaluate(x, n, cache):
        shape = x.shape[:-1]
        return Jet(
            np.full(shape, c),
            np.zeros(shape + (3,), complex) if n >= 1 else None,
            np.zeros(shape + (3, 3), complex) if n >= 2 else None,
        )

    return ScalarField(evaluate, 2, name=f"const({c})", const=c)


ZERO = constant(0)
ONE = constant(1)


def linear(a, b=0) -> ScalarField:
    """``<a, x> + b`` with complex coefficient vector ``a``."""
    a = np.asarray(a, dtype=complex)
    b = complex(b)
    if not np.any(a):
        return constant(b)

    def evaluate(x, n, cache):
        shape = x.shape[:-1]
        return Jet(
            x @ a + b,
            np.broadcast_to(a, shape + (3,)).copy() if n >= 1 else None,
            np.zeros(shape + (3, 3), complex) if n >= 2 else None,
        )

    return ScalarField(evaluate, 2, name=f"linear({a.tolist()}, {b})")


def coordinate(k: int) -> ScalarField:
    """The coordinate function ``x_k`` for ``k`` in 1..3."""
    if k not in (1, 2, 3):
        raise ValueError("coordinate index must be 1, 2 or 3")
    a = np.zeros(3)
    a[k - 1] = 1
    f = linear(a)
    f.name = f"x{k}"
    return f


def radius(center=(0.0, 0.0, 0.0)) -> ScalarField:
    """Distance ``|x - center|``; singular (non-differentiable) at the center."""
    center = np.asarray(center, dtype=float)

    def evaluate(x, n, cache):
        d = x - center
        r = np.linalg.norm(d, axis=-1)
        grad = hess = None
        if n >= 1:
            unit = d / r[..., None]
            grad = unit.astype(complex)
            if n >= 2:
                hess = ((np.eye(3) - _outer(unit, unit)) / r[..., None, None]).astype(complex)
        return Jet(r.astype(complex), grad, hess)

    return ScalarField(evaluate, 2, singular=[center], name="radius")


def _compose(u: ScalarField, derivs, name, guard=None) -> ScalarField:
    """``F(u)`` where ``derivs(v, n)`` returns ``(F, F', F'')`` at ``v`` up to order n."""
    if u.const is not None:
        if guard is not None:
            guard(np.asarray(u.const), None)
        return constant(derivs(np.asarray(u.const), 0)[0])

    def evaluate(x, n, cache):
        ju = u._jet(x, n, cache)
        if guard is not None:
            guard(ju.val, x)
        f = derivs(ju.val, n)
        return _jet_compose(ju, *f)

    return ScalarField(evaluate, u.order, u.singular, name=name)


def exp(u) -> ScalarField:
    def derivs(v, n):
        e = np.exp(v)
        return (e,) * (n + 1)

    return _compose(_as_field(u), derivs, "exp")


def sin(u) -> ScalarField:
    def derivs(v, n):
        s, c = np.sin(v), np.cos(v)
        return (s, c, -s)[: n + 1]

    return _compose(_as_field(u), derivs, "sin")


def cos(u) -> ScalarField:
    def derivs(v, n):
        s, c = np.sin(v), np.cos(v)
        return (c, -s, -c)[: n + 1]

    return _compose(_as_field(u), derivs, "cos")


def _location(x, mask):
    if x is None:
        return None
    return tuple(float(c) for c in x.reshape(-1, 3)[int(np.flatnonzero(mask.reshape(-1))[0])])


def _nonzero_guard(v, x):
    bad = v == 0
    if np.any(bad):
        raise SingularityError(f"field vanishes at {_location(x, bad)}")


def reciprocal(u) -> ScalarField:
    """``1/u``; raises :class:`SingularityError` where ``u`` vanishes."""

    def derivs(v, n):
        r = 1 / v
        return (r, -r * r, 2 * r * r * r)[: n + 1]

    return _compose(_as_field(u), derivs, "reciprocal", guard=_nonzero_guard)


def _principal_guard(v, x):
    _nonzero_guard(v, x)
    on_cut = (v.imag == 0) & (v.real < 0)
    if np.any(on_cut):
        loc = _location(x, on_cut)
        raise BranchError(f"principal square root evaluated on its branch cut at {loc}", loc)


def sqrt(u) -> ScalarField:
    """Principal square root (argument in (-pi/2, pi/2]).

    Evaluating exactly on the negative real axis raises :class:`BranchError`
    instead of silently picking a side.
    """

    def derivs(v, n):
        s = np.sqrt(v)
        return (s, 0.5 / s, -0.25 / (v * s))[: n + 1]

    return _compose(_as_field(u), derivs, "sqrt", guard=_principal_guard)


def partial(f: ScalarField, k: int) -> ScalarField:
    """The exact partial derivative field ``d f / d x_k`` (k in 1..3)."""
    if f.const is not None:
        return ZERO
    if f.order < 1:
        raise MissingOracle("cannot differentiate a field without a gradient oracle")
    j = k - 1

    def evaluate(x, n, cache):
        jf = f._jet(x, n + 1, cache)
        return Jet(jf.grad[..., j], None if n < 1 else jf.hess[..., j, :])

    return ScalarField(evaluate, f.order - 1, f.singular, name=f"d{k}({f.name or 'f'})")


def from_oracles(value, gradient=None, hessian=None, singular=(), name=None) -> ScalarField:
    """Field from user-supplied closed forms (vectorized over points)."""
    order = 0 if gradient is None else (1 if hessian is None else 2)

    def evaluate(x, n, cache):
        v = np.asarray(value(x), dtype=complex)
        shape = x.shape[:-1]
        return Jet(
            np.broadcast_to(v, shape).copy(),
            np.broadcast_to(np.asarray(gradient(x), complex), shape + (3,)).copy() if n >= 1 else None,
            np.broadcast_to(np.asarray(hessian(x), complex), shape + (3, 3)).copy() if n >= 2 else None,
        )

    return ScalarField(evaluate, order, singular, name=name)


# -- biquaternion fields ---------------------------------------------------

class QuatField:
    """Biquaternion-valued field built from four scalar component fields.

    Products of fields follow the biquaternion product formula applied to
    component fields, so every derived field carries exact derivative
    oracles through the scalar product rule.
    """

    def __init__(self, f0=0, f1=0, f2=0, f3=0):
        comps = tuple(_as_field(f) for f in (f0, f1, f2, f3))
        if any(c is None for c in comps):
            raise TypeError("QuatField components must be ScalarField or numbers")
        self.components = comps

    @classmethod
    def vector(cls, f1=0, f2=0, f3=0) -> "QuatField":
        return cls(0, f1, f2, f3)

    @classmethod
    def constant(cls, q) -> "QuatField":
        c = q.coeffs if isinstance(q, Biquaternion) else np.asarray(q, dtype=complex)
        return cls(*(complex(v) for v in c))

    @property
    def is_vector(self) -> bool:
        """Structurally zero scalar part."""
        return self.components[0].const == 0

    @property
    def singular(self):
        return _merge_singular(*self.components)

    @property
    def order(self):
        return min(c.order for c in self.components)

    def require_vector(self, what="field"):
        if not self.is_vector:
            raise ContractViolation(f"{what} must be purely vectorial (zero scalar part)")
        return self

    def check_domain(self, x):
        check_singular(self.singular, x)

    def jets(self, x, order=1, cache=None):
        x = as_points(x)
        self.check_domain(x)
        cache = {} if cache is None else cache
        return [c._jet(x, order, cache) for c in self.components]

    def value(self, x, cache=None) -> Biquaternion:
        vals = [j.val for j in self.jets(x, 0, cache)]
        return Biquaternion(*vals)

    __call__ = value

    def jacobian(self, x, cache=None) -> np.ndarray:
        """Partials ``d f_j / d x_k`` as an array of shape ``(..., 4, 3)``."""
        return np.stack([j.grad for j in self.jets(x, 1, cache)], axis=-2)

    def scalar_part(self) -> "QuatField":
        return QuatField(self.components[0])

    def vector_part(self) -> "QuatField":
        return QuatField(0, *self.components[1:])

    def __getitem__(self, k) -> ScalarField:
        return self.components[k]

    def __add__(self, other):
        other = _as_quat(other)
        if other is None:
            return NotImplemented
        return QuatField(*(a + b for a, b in zip(self.components, other.components)))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_quat(other)
        if other is None:
            return NotImplemented
        return QuatField(*(a - b for a, b in zip(self.components, other.components)))

    def __rsub__(self, other):
        other = _as_quat(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return QuatField(*(-a for a in self.components))

    def __mul__(self, other):
        if isinstance(other, (ScalarField, numbers.Number)):
            return QuatField(*(a * other for a in self.components))
        other = _as_quat(other)
        if other is None:
            return NotImplemented
        return field_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (ScalarField, numbers.Number)):
            return QuatField(*(other * a for a in self.components))
        other = _as_quat(other)
        if other is None:
            return NotImplemented
        return field_mul(other, self)

    def __truediv__(self, other):
        if isinstance(other, (ScalarField, numbers.Number)):
            inv = reciprocal(other) if isinstance(other, ScalarField) else 1 / complex(other)
            return self * inv
        return NotImplemented


def _as_quat(obj):
    if isinstance(obj, QuatField):
        return obj
    if isinstance(obj, Biquaternion):
        return QuatField.constant(obj)
    if isinstance(obj, (ScalarField, numbers.Number)):
        return QuatField(obj)
    return None


def field_mul(p: QuatField, q: QuatField) -> QuatField:
    """Pointwise biquaternion product of two fields."""
    p0, p1, p2, p3 = p.components
    q0, q1, q2, q3 = q.components
    return QuatField(
        p0 * q0 - (p1 * q1 + p2 * q2 + p3 * q3),
        (p2 * q3 - p3 * q2) + p0 * q1 + q0 * p1,
        (p3 * q1 - p1 * q3) + p0 * q2 + q0 * p2,
        (p1 * q2 - p2 * q1) + p0 * q3 + q0 * p3,
    )
