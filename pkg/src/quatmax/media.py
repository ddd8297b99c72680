"""Media profiles (permittivity, permeability) and their derived quantities.

A profile carries closed-form ``eps`` and ``mu`` fields and, optionally,
explicit square roots. When no explicit root is given the principal branch
is used, and :func:`transform` refuses sample sets on which that branch
would jump.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fields as F
from .errors import BranchError, ConfigurationError, ContractViolation
from .fields import QuatField, ScalarField

__all__ = [
    "MediumProfile",
    "TransformedQuantities",
    "SourceData",
    "log_derivative_vector",
    "transform",
    "scale_fields",
    "unscale_fields",
    "catalog",
    "make_profile",
    "parse_profile",
    "parse_params",
    "check_branch",
    "PROFILE_NAMES",
]


@dataclass(frozen=True)
class MediumProfile:
    name: str
    eps: ScalarField
    mu: ScalarField
    params: dict = field(default_factory=dict)
    sqrt_eps: Optional[ScalarField] = None
    sqrt_mu: Optional[ScalarField] = None

    @property
    def singular(self):
        return F._merge_singular(self.eps, self.mu)

    @property
    def phi(self) -> ScalarField:
        """Generating function of the static electric problem, ``sqrt(eps)``."""
        return self.sqrt_eps if self.sqrt_eps is not None else F.sqrt(self.eps)

    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={_fmt(v)}" for k, v in self.params.items())


def _fmt(v):
    if isinstance(v, (tuple, list)):
        return ",".join(_fmt(c) for c in v)
    v = complex(v)
    return repr(v.real) if v.imag == 0 else repr(v)


@dataclass(frozen=True)
class TransformedQuantities:
    """``sqrt(eps)``, ``sqrt(mu)``, ``eps_vec``, ``mu_vec`` and ``k`` for one medium."""

    sqrt_eps: ScalarField
    sqrt_mu: ScalarField
    eps_vec: QuatField
    mu_vec: QuatField
    k: ScalarField
    omega: complex
    profile: Optional[MediumProfile] = None


@dataclass(frozen=True)
class SourceData:
    rho: ScalarField = F.ZERO
    j: QuatField = field(default_factory=QuatField)
    omega: complex = 0.0

    def __post_init__(self):
        self.j.require_vector("current density j")


def log_derivative_vector(phi: ScalarField) -> QuatField:
    """The purely vectorial field ``grad phi / phi``."""
    inv = F.reciprocal(phi)
    return QuatField.vector(*(F.partial(phi, k) * inv for k in (1, 2, 3)))


def check_branch(f: ScalarField, points, what="eps"):
    """Raise :class:`BranchError` if principal ``sqrt(f)`` jumps on ``points``.

    The principal root is discontinuous across the negative real axis; a
    sample set whose values reach that half-line from both sides is
    rejected, reporting the first offending point.
    """
    pts = F.as_points(points).reshape(-1, 3)
    v = f.value(pts)
    left = v.real < 0
    on_cut = left & (v.imag == 0)
    upper = left & (v.imag > 0)
    lower = left & (v.imag < 0)
    bad = on_cut | (lower if upper.any() and lower.any() else np.zeros_like(left))
    if bad.any():
        loc = tuple(float(c) for c in pts[int(np.flatnonzero(bad)[0])])
        raise BranchError(f"principal sqrt({what}) crosses the negative real axis near {loc}", loc)


def transform(m: MediumProfile, omega=1.0, points=None) -> TransformedQuantities:
    """Derived quantities of medium ``m`` at frequency ``omega``.

    ``k`` is formed as ``omega * sqrt(eps) * sqrt(mu)`` from the same roots
    used for the field scaling, so that ``k^2 = omega^2 eps mu`` holds on
    any branch.
    """
    roots = []
    for name, f, root in (("eps", m.eps, m.sqrt_eps), ("mu", m.mu, m.sqrt_mu)):
        if root is None:
            if points is not None:
                check_branch(f, points, name)
            root = F.sqrt(f)
        elif points is not None:
            pts = F.as_points(points)
            r, v = root.value(pts), f.value(pts)
            if np.any(np.abs(r * r - v) > 1e-12 * np.maximum(1.0, np.abs(v))):
                raise ContractViolation(f"supplied sqrt({name}) does not square to {name}")
        roots.append(root)
    sqrt_eps, sqrt_mu = roots
    omega = complex(omega)
    return TransformedQuantities(
        sqrt_eps=sqrt_eps,
        sqrt_mu=sqrt_mu,
        eps_vec=log_derivative_vector(sqrt_eps),
        mu_vec=log_derivative_vector(sqrt_mu),
        k=omega * (sqrt_eps * sqrt_mu),
        omega=omega,
        profile=m,
    )


def scale_fields(E: QuatField, H: QuatField, t: TransformedQuantities):
    """Return ``(sqrt(eps) E, sqrt(mu) H)``."""
    E.require_vector("E")
    H.require_vector("H")
    return t.sqrt_eps * E, t.sqrt_mu * H


def unscale_fields(cal_E: QuatField, cal_H: QuatField, t: TransformedQuantities):
    cal_E.require_vector("scaled E")
    cal_H.require_vector("scaled H")
    return cal_E / t.sqrt_eps, cal_H / t.sqrt_mu


# -- catalog ---------------------------------------------------------------

def _vec(v, name):
    if isinstance(v, (int, float, complex)):
        raise ConfigurationError(f"parameter {name} needs three components")
    v = tuple(v)
    if len(v) != 3:
        raise ConfigurationError(f"parameter {name} needs three components, got {len(v)}")
    return tuple(complex(c) for c in v)


def _scalar(v, name):
    if isinstance(v, (tuple, list)):
        if len(v) != 1:
            raise ConfigurationError(f"parameter {name} must be a scalar")
        v = v[0]
    return complex(v)


def _vacuum():
    return MediumProfile("vacuum", F.ONE, F.ONE, {}, F.ONE, F.ONE)


def _exp(a=(1, 0, 0), d=0.0, b=(0, 0, 0), e=0.0, name="exp"):
    a, b = _vec(a, "a"), _vec(b, "b")
    d, e = _scalar(d, "d"), _scalar(e, "e")
    u_eps, u_mu = F.linear(a, d), F.linear(b, e)
    half = lambda v: tuple(c / 2 for c in v)  # noqa: E731
    return MediumProfile(
        name,
        F.exp(u_eps),
        F.exp(u_mu),
        {"a": a, "d": d, "b": b, "e": e},
        F.exp(F.linear(half(a), d / 2)),
        F.exp(F.linear(half(b), e / 2)),
    )


def _product_exp(a=(1, 2, 0), d=0.0, b=(0, 0, 1), e=0.0):
    return _exp(a, d, b, e, name="product-exp")


def _planewave_phi(c=(0, 0, 1)):
    c = _vec(c, "c")
    phi = F.exp(F.linear(tuple(1j * ci for ci in c)))
    return MediumProfile("planewave-phi", phi * phi, F.ONE, {"c": c}, phi, F.ONE)


def spherical_wave(c, center=(0.0, 0.0, 0.0)) -> ScalarField:
    """``exp(i c r) / (4 pi r)`` with ``r = |x - center|``."""
    c = complex(c)
    r = F.radius(center)
    f = F.exp(1j * c * r) * F.reciprocal(4 * math.pi * r)
    f.name = f"spherical({c})"
    return f


def _spherical(c=1.0):
    c = _scalar(c, "c")
    phi = spherical_wave(c)
    return MediumProfile("spherical", phi * phi, F.ONE, {"c": c}, phi, F.ONE)


_FACTORIES = {
    "vacuum": _vacuum,
    "exp": _exp,
    "product-exp": _product_exp,
    "planewave-phi": _planewave_phi,
    "spherical": _spherical,
}
PROFILE_NAMES = tuple(_FACTORIES)


def make_profile(name: str, **params) -> MediumProfile:
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown profile {name!r}; choose from {', '.join(PROFILE_NAMES)}"
        ) from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for profile {name!r}: {exc}") from None


def catalog() -> list:
    """Every named profile with its default parameters."""
    return [make_profile(name) for name in PROFILE_NAMES]


def _number(tok):
    try:
        v = complex(tok.replace("i", "j")) if "j" in tok or "i" in tok else float(tok)
    except ValueError:
        raise ConfigurationError(f"cannot parse number {tok!r}") from None
    return v


def parse_params(text: str) -> dict:
    """Parse ``a=1,0,0,d=0.5`` into ``{'a': (1.0, 0.0, 0.0), 'd': 0.5}``.

    A bare token continues the vector of the preceding key.
    """
    params: dict = {}
    key = None
    for tok in filter(None, (t.strip() for t in text.split(","))):
        if "=" in tok:
            key, tok = (s.strip() for s in tok.split("=", 1))
            if not key:
                raise ConfigurationError(f"empty parameter name in {text!r}")
            params[key] = []
        elif key is None:
            raise ConfigurationError(f"value {tok!r} without a parameter name in {text!r}")
        params[key].append(_number(tok))
    return {k: (v[0] if len(v) == 1 else tuple(v)) for k, v in params.items()}


def parse_profile(text: str) -> MediumProfile:
    """Build a profile from ``name`` or ``name:param=value,...``."""
    name, _, rest = text.partition(":")
    return make_profile(name.strip(), **parse_params(rest))

