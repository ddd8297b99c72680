"""Static solutions of ``(D + M^alpha) f = 0`` with ``alpha = grad(phi)/phi``.

``M^alpha`` is right multiplication by ``alpha``. Any solution ``psi`` of
the Schrodinger equation ``-Lap psi + v psi = 0`` with ``v = Lap(phi)/phi``
is mapped to a solution by ``f = grad psi - psi alpha``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import fields as F
from .biquat import Biquaternion, from_vec3, mul
from .calculus import apply_D
from .errors import ContractViolation, SingularityError
from .fields import QuatField, ScalarField, as_points
from .grid import GridField, GridSpec, apply_D_grid, sample
from .media import MediumProfile, log_derivative_vector, spherical_wave

__all__ = [
    "GeneratingFunction",
    "SchrodingerSolution",
    "potential_from_phi",
    "darboux_transform",
    "dirac_residual",
    "riccati_residual",
    "factorization_residual",
    "fundamental_psi",
    "fundamental_solution",
    "fundamental_solution_field",
    "static_maxwell_solution",
    "dirac_residual_grid",
    "default_check_points",
    "POTENTIAL_TOL",
]

POTENTIAL_TOL = 1e-8
RICCATI_TOL = 1e-10


def potential_from_phi(phi: ScalarField) -> ScalarField:
    """``v = Lap(phi) / phi`` (value oracle only: its gradient would need third derivatives)."""
    if phi.const is not None:
        if phi.const == 0:
            raise SingularityError("phi is identically zero")
        return F.ZERO

    def evaluate(x, n, cache):
        jet = phi._jet(x, 2, cache)
        if np.any(jet.val == 0):
            raise SingularityError("phi vanishes at an evaluation point")
        return F.Jet(np.trace(jet.hess, axis1=-2, axis2=-1) / jet.val)

    return ScalarField(evaluate, 0, phi.singular, name="potential")


def default_check_points(singular=(), n=64, seed=0, box=1.0, keep_out=0.1):
    """Deterministic points in ``[-box, box]^3`` at distance > keep_out from singular points."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-box, box, size=(4 * n, 3))
    for s in singular:
        pts = pts[np.linalg.norm(pts - np.asarray(s), axis=-1) > keep_out]
    return pts[:n]


@dataclass(frozen=True)
class GeneratingFunction:
    """Nonvanishing ``phi`` with ``alpha = grad phi / phi`` and ``v = Lap phi / phi``.

    ``v`` may be given in closed form (e.g. a constant); it is then checked
    against ``Lap phi / phi`` on :func:`default_check_points`.
    """

    phi: ScalarField
    alpha: QuatField
    v: ScalarField

    @classmethod
    def from_phi(cls, phi: ScalarField, v: Optional[ScalarField] = None, check_points=None):
        exact = potential_from_phi(phi)
        if v is None:
            v = exact
        else:
            v = F._as_field(v)
            pts = default_check_points(phi.singular) if check_points is None else check_points
            _require_same_potential(exact, v, pts, "closed-form potential")
        return cls(phi, log_derivative_vector(phi), v)

    def schrodinger_residual(self, x):
        """``-Lap phi + v phi``."""
        jet = self.phi.jet(x, 2)
        return -np.trace(jet.hess, axis1=-2, axis2=-1) + self.v.value(x) * jet.val


@dataclass(frozen=True)
class SchrodingerSolution:
    psi: ScalarField
    v: ScalarField

    def residual(self, x):
        """``-Lap psi + v psi``."""
        jet = self.psi.jet(x, 2)
        return -np.trace(jet.hess, axis1=-2, axis2=-1) + self.v.value(x) * jet.val


def _require_same_potential(v1, v2, pts, what, tol=POTENTIAL_TOL):
    pts = as_points(pts)
    gap = np.abs(v1.value(pts) - v2.value(pts))
    if gap.size and gap.max() > tol:
        i = int(np.argmax(gap))
        raise ContractViolation(
            f"{what} mismatch {gap.max():.3e} > {tol} at {tuple(pts.reshape(-1, 3)[i])}"
        )


def darboux_transform(g: GeneratingFunction, psi: SchrodingerSolution, check_points=None) -> QuatField:
    """``f = grad psi - psi alpha``, a solution of ``(D + M^alpha) f = 0``.

    The potentials of ``g`` and ``psi`` are compared at construction.
    """
    if check_points is None:
        check_points = default_check_points(F._merge_singular(g.phi, psi.psi))
    _require_same_potential(g.v, psi.v, check_points, "potential")
    p = psi.psi
    return QuatField.vector(*(F.partial(p, k) - p * g.alpha[k] for k in (1, 2, 3)))


def dirac_residual(f: QuatField, alpha: QuatField, x) -> Biquaternion:
    """``(D + M^alpha) f = Df + f alpha``."""
    f.require_vector("f")
    alpha.require_vector("alpha")
    x = as_points(x)
    cache: dict = {}
    return apply_D(f, x, cache) + mul(f.value(x, cache), alpha.value(x, cache))


def riccati_residual(alpha: QuatField, v: ScalarField, x) -> Biquaternion:
    """``D alpha + alpha^2 + v``."""
    alpha.require_vector("alpha")
    x = as_points(x)
    a = alpha.value(x)
    return apply_D(alpha, x) + mul(a, a) + v.value(x)


def factorization_residual(u: ScalarField, alpha: QuatField, v: ScalarField, x, check=True) -> Biquaternion:
    """``(D + M^alpha)(D - M^alpha) u - (-Lap u + v u)`` for scalar ``u``."""
    x = as_points(x)
    if check:
        r = riccati_residual(alpha, v, x).norm_inf()
        if r.size and r.max() > RICCATI_TOL:
            raise ContractViolation(f"alpha does not satisfy the Riccati equation (residual {r.max():.3e})")
    inner = QuatField.vector(*(F.partial(u, k) for k in (1, 2, 3))) - u * alpha
    outer = apply_D(inner, x) + mul(inner.value(x), alpha.value(x))
    jet = u.jet(x, 2)
    target = -np.trace(jet.hess, axis1=-2, axis2=-1) + v.value(x) * jet.val
    return outer - target


def fundamental_psi(c, center=(0.0, 0.0, 0.0)) -> ScalarField:
    """``exp(i c |x|) / (4 pi |x|)``, solving ``(-Lap - c^2) psi = 0`` off the center."""
    return spherical_wave(c, center)


def _constant_potential(c):
    return F.constant(-complex(c) ** 2)


def fundamental_solution(g: GeneratingFunction, c, x) -> Biquaternion:
    """Closed form ``(-x/|x|^2 + i c x/|x| - alpha) exp(i c |x|)/(4 pi |x|)``.

    ``x`` enters as the vector biquaternion ``sum x_k i_k``.
    """
    x = as_points(x)
    c = complex(c)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise SingularityError("fundamental solution is singular at the origin")
    _require_same_potential(g.v, _constant_potential(c), x, "potential vs -c^2", tol=1e-10)
    xv = x.astype(complex)
    coef = -xv / (r * r)[..., None] + 1j * c * xv / r[..., None] - g.alpha.value(x).vector
    psi = np.exp(1j * c * r) / (4 * math.pi * r)
    return from_vec3(coef * psi[..., None])


def fundamental_solution_field(g: GeneratingFunction, c) -> QuatField:
    """The closed form above as a field, assembled from coordinate and radius fields."""
    c = complex(c)
    r = F.radius()
    inv_r = F.reciprocal(r)
    psi = fundamental_psi(c)
    comps = []
    for k in (1, 2, 3):
        xk = F.coordinate(k)
        comps.append((-xk * inv_r * inv_r + 1j * c * xk * inv_r - g.alpha[k]) * psi)
    return QuatField.vector(*comps)


def static_maxwell_solution(m: MediumProfile, psi: SchrodingerSolution, check_points=None) -> QuatField:
    """Source-free static electric field ``E = f / sqrt(eps)`` in medium ``m``.

    ``f`` is the Darboux transform of ``psi`` with generating function
    ``sqrt(eps)``; ``psi`` must solve the potential ``Lap sqrt(eps) / sqrt(eps)``.
    """
    phi = m.phi
    g = GeneratingFunction(phi, log_derivative_vector(phi), potential_from_phi(phi))
    f = darboux_transform(g, psi, check_points)
    return f / phi


def dirac_residual_grid(f: QuatField, alpha: QuatField, spec: GridSpec) -> GridField:
    """``(D + M^alpha) f`` with ``D`` replaced by central differences."""
    dg = apply_D_grid(sample(f, spec))
    out = np.zeros_like(dg.values)
    pts = spec.nodes()[dg.valid]
    if pts.size:
        out[dg.valid] = dg.values[dg.valid] + mul(f.value(pts), alpha.value(pts)).coeffs
    return GridField(spec, out, dg.valid)
