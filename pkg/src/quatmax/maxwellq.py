"""Residuals of the time-harmonic Maxwell system in classical and quaternionic form.

Classical residuals (zero for a solution)::

    s1 = div(eps E) - rho          s2 = rot E + i w mu H
    s3 = div(mu H)                 s4 = rot H - i w eps E - j

Quaternionic residuals, with ``cE = sqrt(eps) E`` and ``cH = sqrt(mu) H``::

    R1 = D cE + cE . eps_vec + i k cH + rho / sqrt(eps)
    R2 = D cH + cH . mu_vec  - i k cE - sqrt(mu) j

The coefficient vectors act by right multiplication. Expanding
``D(sqrt(eps) E)`` with the product rule and using
``p q + q p = -2 <p, q>`` for vectors gives, for any smooth E and H::

    R1 = -s1 / sqrt(eps) + sqrt(eps) s2
    R2 = -s3 / sqrt(mu)  + sqrt(mu)  s4

which :func:`equivalence_map` implements and the tests check pointwise.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .biquat import Biquaternion, mul
from .calculus import apply_D
from .errors import ConfigurationError, ContractViolation
from .fields import QuatField, as_points
from .grid import GridField, GridSpec, apply_D_grid, sample
from .media import MediumProfile, SourceData, TransformedQuantities

__all__ = [
    "ClassicalResiduals",
    "QuaternionicResiduals",
    "ResidualReport",
    "classical_residuals",
    "quaternionic_residuals",
    "equivalence_map",
    "inverse_equivalence_map",
    "static_residuals",
    "quaternionic_residuals_grid",
    "sweep",
    "node_norms",
    "thread_count",
]


@dataclass(frozen=True)
class ClassicalResiduals:
    s1: np.ndarray  # (...,) complex
    s2: np.ndarray  # (..., 3) complex
    s3: np.ndarray
    s4: np.ndarray

    def as_dict(self):
        return {"s1": self.s1, "s2": self.s2, "s3": self.s3, "s4": self.s4}


@dataclass(frozen=True)
class QuaternionicResiduals:
    R1: Biquaternion
    R2: Biquaternion

    def as_dict(self):
        return {"R1": self.R1.coeffs, "R2": self.R2.coeffs}


def _div_rot(jac):
    div = jac[..., 1, 0] + jac[..., 2, 1] + jac[..., 3, 2]
    rot = np.stack(
        [
            jac[..., 3, 1] - jac[..., 2, 2],
            jac[..., 1, 2] - jac[..., 3, 0],
            jac[..., 2, 0] - jac[..., 1, 1],
        ],
        axis=-1,
    )
    return div, rot


def classical_residuals(
    E: QuatField, H: QuatField, m: MediumProfile, s: SourceData, x
) -> ClassicalResiduals:
    E.require_vector("E")
    H.require_vector("H")
    x = as_points(x)
    omega = complex(s.omega)
    cache: dict = {}
    eps_E, mu_H = m.eps * E, m.mu * H
    div_eps_E, _ = _div_rot(eps_E.jacobian(x, cache))
    div_mu_H, _ = _div_rot(mu_H.jacobian(x, cache))
    _, rot_E = _div_rot(E.jacobian(x, cache))
    _, rot_H = _div_rot(H.jacobian(x, cache))
    eps, mu = m.eps.value(x), m.mu.value(x)
    e_vec, h_vec = E.value(x, cache).vector, H.value(x, cache).vector
    return ClassicalResiduals(
        s1=div_eps_E - s.rho.value(x),
        s2=rot_E + 1j * omega * mu[..., None] * h_vec,
        s3=div_mu_H,
        s4=rot_H - 1j * omega * eps[..., None] * e_vec - s.j.value(x).vector,
    )


def quaternionic_residuals(
    cal_E: QuatField, cal_H: QuatField, t: TransformedQuantities, s: SourceData, x
) -> QuaternionicResiduals:
    cal_E.require_vector("scaled E")
    cal_H.require_vector("scaled H")
    x = as_points(x)
    e, h = cal_E.value(x), cal_H.value(x)
    k = t.k.value(x)
    r1 = apply_D(cal_E, x) + mul(e, t.eps_vec.value(x)) + (1j * k) * h
    r1 = r1 + s.rho.value(x) / t.sqrt_eps.value(x)
    r2 = apply_D(cal_H, x) + mul(h, t.mu_vec.value(x)) - (1j * k) * e
    r2 = r2 - t.sqrt_mu.value(x) * s.j.value(x)
    return QuaternionicResiduals(r1, r2)


def equivalence_map(c: ClassicalResiduals, t: TransformedQuantities, x) -> QuaternionicResiduals:
    """Quaternionic residuals predicted from classical ones at points ``x``."""
    x = as_points(x)
    se, sm = t.sqrt_eps.value(x), t.sqrt_mu.value(x)
    r1 = Biquaternion.from_parts(-c.s1 / se, se[..., None] * c.s2)
    r2 = Biquaternion.from_parts(-c.s3 / sm, sm[..., None] * c.s4)
    return QuaternionicResiduals(r1, r2)


def inverse_equivalence_map(q: QuaternionicResiduals, t: TransformedQuantities, x) -> ClassicalResiduals:
    x = as_points(x)
    se, sm = t.sqrt_eps.value(x), t.sqrt_mu.value(x)
    return ClassicalResiduals(
        s1=-se * q.R1.scalar,
        s2=q.R1.vector / se[..., None],
        s3=-sm * q.R2.scalar,
        s4=q.R2.vector / sm[..., None],
    )


def static_residuals(field_: QuatField, t: TransformedQuantities, s: SourceData, x, kind="electric"):
    """Static (omega = 0) residual of the electric or magnetic equation."""
    if complex(s.omega) != 0 or complex(t.omega) != 0:
        raise ContractViolation("static residuals require omega == 0")
    field_.require_vector("static field")
    x = as_points(x)
    f = field_.value(x)
    if kind == "electric":
        return apply_D(field_, x) + mul(f, t.eps_vec.value(x)) + s.rho.value(x) / t.sqrt_eps.value(x)
    if kind == "magnetic":
        return apply_D(field_, x) + mul(f, t.mu_vec.value(x)) - t.sqrt_mu.value(x) * s.j.value(x)
    raise ValueError(f"kind must be 'electric' or 'magnetic', got {kind!r}")


def quaternionic_residuals_grid(
    cal_E: QuatField, cal_H: QuatField, t: TransformedQuantities, s: SourceData, spec: GridSpec
) -> dict:
    """``R1`` and ``R2`` on a grid, with ``D`` replaced by central differences."""
    dE = apply_D_grid(sample(cal_E, spec))
    dH = apply_D_grid(sample(cal_H, spec))
    valid = dE.valid & dH.valid
    pts = spec.nodes()[valid]
    r1 = np.zeros(spec.counts + (4,), dtype=complex)
    r2 = np.zeros_like(r1)
    if pts.size:
        q = quaternionic_residuals(cal_E, cal_H, t, s, pts)
        # swap the exact D for the differenced one
        r1[valid] = q.R1.coeffs - apply_D(cal_E, pts).coeffs + dE.values[valid]
        r2[valid] = q.R2.coeffs - apply_D(cal_H, pts).coeffs + dH.values[valid]
    return {"R1": GridField(spec, r1, valid), "R2": GridField(spec, r2, valid)}


# -- sweeps and reports ------------------------------------------------------

def node_norms(arr) -> np.ndarray:
    """Per-node max over all real and imaginary components.

    ``arr`` is ``(N,)`` for scalar residuals or ``(N, m)`` for vector and
    biquaternion residuals.
    """
    arr = np.asarray(arr)
    a = np.maximum(np.abs(arr.real), np.abs(arr.imag))
    return a if a.ndim == 1 else a.reshape(a.shape[0], -1).max(axis=1)


def _complex_json(z):
    z = complex(z)
    return z.real if z.imag == 0 else {"re": z.real, "im": z.imag}


@dataclass
class ResidualReport:
    residuals: dict  # name -> {"linf": float, "l2": float}
    grid: dict
    n_valid: int
    profile: Optional[str] = None
    omega: Optional[complex] = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_arrays(cls, arrays: dict, grid: dict, **kwargs) -> "ResidualReport":
        res = {}
        n = None
        for name, arr in arrays.items():
            nn = node_norms(arr)
            n = nn.shape[0]
            # np.sum uses pairwise summation: deterministic for a fixed node order
            res[name] = {
                "linf": float(nn.max()) if nn.size else 0.0,
                "l2": float(np.sqrt(np.sum(nn * nn))),
            }
        return cls(res, grid, n or 0, **kwargs)

    def linf(self, name=None) -> float:
        if name is not None:
            return self.residuals[name]["linf"]
        return max(r["linf"] for r in self.residuals.values())

    def to_dict(self) -> dict:
        d = {
            "profile": self.profile,
            "omega": None if self.omega is None else _complex_json(self.omega),
            "grid": self.grid,
            "n_valid": self.n_valid,
            "residuals": self.residuals,
        }
        d.update(self.extra)
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def thread_count() -> int:
    """Sweep parallelism from ``QUATMAX_THREADS`` (0 or unset means auto)."""
    raw = os.environ.get("QUATMAX_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigurationError(f"QUATMAX_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigurationError("QUATMAX_THREADS must be >= 0")
    return n or min(8, os.cpu_count() or 1)


def sweep(
    evaluate: Callable,
    spec: GridSpec,
    *,
    mask=None,
    profile=None,
    omega=None,
    threads=None,
    chunk=8192,
) -> ResidualReport:
    """Evaluate residuals at every valid node of ``spec`` and aggregate norms.

    ``evaluate(points)`` maps an ``(N, 3)`` array to ``{name: residual}``.
    Nodes are processed in fixed-size chunks, possibly in parallel; results
    are reassembled in node order before reduction, so the report does not
    depend on the worker count.
    """
    valid = spec.domain_mask() if mask is None else (mask & spec.domain_mask())
    pts = spec.nodes()[valid]
    if pts.shape[0] == 0:
        raise ConfigurationError("sweep has no valid nodes")
    chunks = [pts[i : i + chunk] for i in range(0, pts.shape[0], chunk)]
    threads = thread_count() if threads is None else threads
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(evaluate, chunks))
    else:
        parts = [evaluate(c) for c in chunks]
    names = list(parts[0])
    arrays = {n: np.concatenate([np.asarray(p[n]) for p in parts], axis=0) for n in names}
    return ResidualReport.from_arrays(
        arrays,
        spec.metadata(),
        profile=profile,
        omega=omega,
    )
