"""The Moisil-Theodoresco operator ``D = sum_k i_k d_k`` on analytic fields.

Two independent evaluation orders are provided: :func:`apply_D` multiplies
each partial derivative by its basis unit, :func:`vector_form_D` assembles
``-div f + grad f0 + rot f`` from the same Jacobian. They must agree.
"""
from __future__ import annotations

import numpy as np

from .biquat import BASIS, Biquaternion, from_vec3, mul
from .errors import SingularityError
from .fields import QuatField, ScalarField, as_points, reciprocal

__all__ = [
    "apply_D",
    "apply_D_analytic",
    "div",
    "grad",
    "rot",
    "vector_form_D",
    "grad_scalar",
    "leibniz_residual",
    "gauge_identity_residual",
]


def _as_quat_field(f):
    return f if isinstance(f, QuatField) else QuatField(f)


def apply_D(f, x, cache=None) -> Biquaternion:
    """Evaluate ``Df = sum_k i_k d_k f`` with exact partials at points ``x``."""
    jac = _as_quat_field(f).jacobian(as_points(x), cache)
    out = None
    for k in range(3):
        term = mul(BASIS[k + 1], Biquaternion.from_array(jac[..., :, k]))
        out = term if out is None else out + term
    return out


apply_D_analytic = apply_D


def div(f: QuatField, x) -> np.ndarray:
    """Divergence of the vector part."""
    jac = _as_quat_field(f).jacobian(as_points(x))
    return jac[..., 1, 0] + jac[..., 2, 1] + jac[..., 3, 2]


def rot(f: QuatField, x) -> np.ndarray:
    """Curl of the vector part, shape ``(..., 3)``."""
    jac = _as_quat_field(f).jacobian(as_points(x))
    return _rot_from_jac(jac)


def _rot_from_jac(jac):
    # jac[..., j, k] = d f_j / d x_k
    return np.stack(
        [
            jac[..., 3, 1] - jac[..., 2, 2],
            jac[..., 1, 2] - jac[..., 3, 0],
            jac[..., 2, 0] - jac[..., 1, 1],
        ],
        axis=-1,
    )


def grad(f0: ScalarField, x) -> np.ndarray:
    """Gradient of a scalar field, shape ``(..., 3)``."""
    return f0.gradient(as_points(x))


def grad_scalar(f: QuatField, x) -> np.ndarray:
    """Gradient of the scalar part of a biquaternion field."""
    return _as_quat_field(f).jacobian(as_points(x))[..., 0, :]


def vector_form_D(f, x) -> Biquaternion:
    """``Df`` assembled as ``-div f_vec + grad f0 + rot f_vec``."""
    jac = _as_quat_field(f).jacobian(as_points(x))
    d = jac[..., 1, 0] + jac[..., 2, 1] + jac[..., 3, 2]
    return Biquaternion.from_parts(-d, jac[..., 0, :] + _rot_from_jac(jac))


def leibniz_residual(phi: ScalarField, f, x) -> Biquaternion:
    """``D(phi f) - (D phi . f + phi Df)``.

    ``D(phi f)`` is taken from the product field's own oracles.
    """
    x = as_points(x)
    f = _as_quat_field(f)
    lhs = apply_D(phi * f, x)
    dphi = from_vec3(phi.gradient(x))
    rhs = mul(dphi, f.value(x)) + phi.value(x) * apply_D(f, x)
    return lhs - rhs


def gauge_identity_residual(phi: ScalarField, f, x) -> Biquaternion:
    """``(D - grad phi/phi) f - phi D(phi^-1 f)``.

    ``grad phi / phi`` multiplies ``f`` from the left.
    """
    x = as_points(x)
    f = _as_quat_field(f)
    jet = phi.jet(x, 1)
    if np.any(jet.val == 0):
        raise SingularityError("phi vanishes at an evaluation point")
    alpha = from_vec3(jet.grad / jet.val[..., None])
    lhs = apply_D(f, x) - mul(alpha, f.value(x))
    rhs = jet.val * apply_D(reciprocal(phi) * f, x)
    return lhs - rhs
