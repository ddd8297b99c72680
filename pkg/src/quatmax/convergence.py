"""Observed order of accuracy under grid refinement.

Errors at every level are measured on the nodes of the coarsest grid (which
stay nodes after halving ``h``), restricted to nodes valid at all levels,
so the comparison is between identical point sets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .biquat import Biquaternion
from .calculus import apply_D
from .grid import GridField, GridSpec, apply_D_grid, sample
from .fields import QuatField

__all__ = ["ConvergenceResult", "run_study", "D_error_on_grid", "observed_orders"]

ORDER_RANGE = (1.8, 2.2)


@dataclass
class ConvergenceResult:
    hs: list
    errors: list
    orders: list = field(default_factory=list)
    status: str = "pass"  # pass | fail | exact | inconclusive

    @property
    def passed(self):
        return self.status in ("pass", "exact")

    def constant(self):
        """``C`` in ``err <= C h^2`` (largest over levels)."""
        return max(e / h**2 for e, h in zip(self.errors, self.hs))

    def to_dict(self):
        return {
            "h": self.hs,
            "errors": self.errors,
            "orders": self.orders,
            "status": self.status,
        }


def observed_orders(errors, ratio=2.0):
    return [math.log(a / b, ratio) for a, b in zip(errors, errors[1:])]


def run_study(
    residual: Callable[[GridSpec], tuple],
    spec: GridSpec,
    levels: int = 2,
    order_range=ORDER_RANGE,
    exact_tol: float = 1e-12,
) -> ConvergenceResult:
    """Refine ``spec`` ``levels - 1`` times and estimate the order.

    ``residual(spec)`` returns ``(per_node_error, valid_mask)`` on that grid.
    """
    if levels < 2:
        raise ValueError("a convergence study needs at least two levels")
    per_level, common, hs = [], None, []
    for lvl in range(levels):
        s = spec.refined(2**lvl) if lvl else spec
        err, valid = residual(s)
        st = 2**lvl
        per_level.append(err[::st, ::st, ::st])
        v = valid[::st, ::st, ::st]
        common = v if common is None else common & v
        hs.append(s.h)
    if not common.any():
        return ConvergenceResult(hs, [], [], "inconclusive")
    errors = [float(e[common].max()) for e in per_level]
    if max(errors) <= exact_tol:
        return ConvergenceResult(hs, errors, [], "exact")
    if any(b >= a for a, b in zip(errors, errors[1:])):
        return ConvergenceResult(hs, errors, [], "inconclusive")
    orders = observed_orders(errors)
    lo, hi = order_range
    status = "pass" if all(lo <= p <= hi for p in orders) else "fail"
    return ConvergenceResult(hs, errors, orders, status)


def per_node_norm(g_values: np.ndarray) -> np.ndarray:
    return Biquaternion.from_array(g_values).norm_inf()


def D_error_on_grid(f: QuatField):
    """Residual callback: ``|D_grid f - D f|`` per node."""

    def residual(spec: GridSpec):
        dg = apply_D_grid(sample(f, spec))
        err = np.zeros(spec.counts)
        pts = spec.nodes()[dg.valid]
        if pts.size:
            exact = apply_D(f, pts).coeffs
            err[dg.valid] = per_node_norm(dg.values[dg.valid] - exact)
        return err, dg.valid

    return residual


def grid_residual(make: Callable[[GridSpec], GridField]):
    """Residual callback from a function returning a residual :class:`GridField`."""

    def residual(spec: GridSpec):
        g = make(spec)
        err = np.where(g.valid, per_node_norm(g.values), 0.0)
        return err, g.valid

    return residual
