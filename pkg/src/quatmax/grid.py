"""Uniform Cartesian sampling of biquaternion fields and a finite-difference D.

Boundary nodes and nodes whose stencil touches the exclusion ball are
flagged invalid; no one-sided stencils are ever used.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .biquat import BASIS, Biquaternion, mul
from .errors import ConfigurationError
from .fields import SINGULAR_ATOL, QuatField

__all__ = ["Ball", "GridSpec", "GridField", "sample", "apply_D_grid", "CSV_HEADER"]

CSV_HEADER = [
    "x1", "x2", "x3",
    "q0_re", "q0_im", "q1_re", "q1_im", "q2_re", "q2_im", "q3_re", "q3_im",
    "valid",
]


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.radius > 0:
            raise ConfigurationError("exclusion radius must be positive")

    def contains(self, x):
        return np.linalg.norm(x - np.asarray(self.center), axis=-1) <= self.radius


@dataclass(frozen=True)
class GridSpec:
    """Nodes ``origin + h * (i, j, k)`` for ``0 <= i < counts[0]`` etc."""

    origin: tuple
    h: float
    counts: tuple
    exclusion: Optional[Ball] = None

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(float(c) for c in self.origin))
        counts = self.counts
        if np.isscalar(counts):
            counts = (counts,) * 3
        counts = tuple(int(n) for n in counts)
        object.__setattr__(self, "counts", counts)
        if len(self.origin) != 3 or len(counts) != 3:
            raise ConfigurationError("origin and counts need three entries")
        if not self.h > 0:
            raise ConfigurationError(f"grid spacing must be positive, got {self.h}")
        if min(counts) < 1:
            raise ConfigurationError(f"node counts must be positive, got {counts}")
        if self.exclusion is not None:
            lo, hi = np.asarray(self.origin), np.asarray(self.upper)
            c, r = np.asarray(self.exclusion.center), self.exclusion.radius
            if not (np.all(c - r > lo) and np.all(c + r < hi)):
                raise ConfigurationError("exclusion ball must lie strictly inside the grid box")

    @classmethod
    def cube(cls, lo, hi, n, exclusion=None) -> "GridSpec":
        """``n`` nodes per axis spanning ``[lo, hi]^3``."""
        return cls((lo,) * 3, (hi - lo) / (n - 1), (n,) * 3, exclusion)

    @property
    def upper(self):
        return tuple(o + self.h * (n - 1) for o, n in zip(self.origin, self.counts))

    @property
    def n_nodes(self):
        return int(np.prod(self.counts))

    def axes(self):
        return [o + self.h * np.arange(n) for o, n in zip(self.origin, self.counts)]

    def nodes(self) -> np.ndarray:
        """Node coordinates, shape ``(n1, n2, n3, 3)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def domain_mask(self) -> np.ndarray:
        """Nodes outside the exclusion ball."""
        if self.exclusion is None:
            return np.ones(self.counts, dtype=bool)
        return ~self.exclusion.contains(self.nodes())

    def refined(self, factor=2) -> "GridSpec":
        """Same box with spacing ``h / factor``; old nodes remain nodes."""
        counts = tuple((n - 1) * factor + 1 for n in self.counts)
        return GridSpec(self.origin, self.h / factor, counts, self.exclusion)

    def metadata(self) -> dict:
        meta = {"origin": list(self.origin), "h": self.h, "counts": list(self.counts)}
        meta["exclusion"] = (
            None
            if self.exclusion is None
            else {"center": list(self.exclusion.center), "radius": self.exclusion.radius}
        )
        return meta


@dataclass(frozen=True)
class GridField:
    spec: GridSpec
    values: np.ndarray  # (n1, n2, n3, 4) complex
    valid: np.ndarray  # (n1, n2, n3) bool

    def __post_init__(self):
        if self.values.shape != tuple(self.spec.counts) + (4,):
            raise ConfigurationError(
                f"sample array shape {self.values.shape} does not match grid {self.spec.counts}"
            )

    def biquaternions(self) -> Biquaternion:
        return Biquaternion.from_array(self.values)

    def to_csv(self, path):
        nodes = self.spec.nodes().reshape(-1, 3)
        vals = self.values.reshape(-1, 4)
        valid = self.valid.reshape(-1)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for x, q, ok in zip(nodes, vals, valid):
                row = [repr(float(c)) for c in x]
                for c in q:
                    row += [repr(float(c.real)), repr(float(c.imag))]
                row.append(int(ok))
                w.writerow(row)

    @classmethod
    def read_csv(cls, path, spec: GridSpec) -> "GridField":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[0] != spec.n_nodes:
            raise ConfigurationError(f"{path}: expected {spec.n_nodes} rows, found {data.shape[0]}")
        values = (data[:, 3:11:2] + 1j * data[:, 4:11:2]).reshape(spec.counts + (4,))
        valid = data[:, 11].astype(bool).reshape(spec.counts)
        return cls(spec, values, valid)


def sample(field: QuatField, spec: GridSpec) -> GridField:
    """Evaluate ``field`` at every node outside the exclusion ball."""
    nodes = spec.nodes()
    mask = spec.domain_mask()
    pts = nodes[mask]
    for p in field.singular:
        if np.any(np.linalg.norm(pts - np.asarray(p), axis=-1) <= SINGULAR_ATOL):
            raise ConfigurationError(
                f"grid node coincides with singular point {p}; add an exclusion ball"
            )
    values = np.zeros(spec.counts + (4,), dtype=complex)
    if pts.size:
        values[mask] = field.value(pts).coeffs
    return GridField(spec, values, mask)


def apply_D_grid(g: GridField) -> GridField:
    """Second-order central-difference ``D`` on interior nodes."""
    n1, n2, n3 = g.spec.counts
    if min(n1, n2, n3) < 3:
        raise ConfigurationError("apply_D_grid needs at least 3 nodes along every axis")
    f, ok, h = g.values, g.valid, g.spec.h
    inner = (slice(1, -1),) * 3
    valid = np.zeros_like(ok)
    v = ok[inner].copy()
    out = np.zeros_like(f)
    acc = np.zeros(f[inner].shape, dtype=complex)
    for k in range(3):
        fwd = [slice(1, -1)] * 3
        bwd = [slice(1, -1)] * 3
        fwd[k] = slice(2, None)
        bwd[k] = slice(None, -2)
        fwd, bwd = tuple(fwd), tuple(bwd)
        v &= ok[fwd] & ok[bwd]
        deriv = (f[fwd] - f[bwd]) / (2 * h)
        acc += mul(BASIS[k + 1], Biquaternion.from_array(deriv)).coeffs
    valid[inner] = v
    out[inner] = np.where(v[..., None], acc, 0)
    return GridField(g.spec, out, valid)
