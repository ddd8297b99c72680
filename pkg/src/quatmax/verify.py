"""Invariant suites behind ``quatmax verify``.

Each suite returns a :class:`SuiteResult` holding one :class:`Check` per
assertion with the observed value next to its tolerance. Randomness comes
only from ``numpy.random.default_rng(seed)``, so a suite's checks are a
pure function of its :class:`VerifyConfig`.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import biquat as B
from . import darboux as Dx
from . import fields as F
from . import maxwellq as Q
from . import media as M
from .calculus import apply_D, gauge_identity_residual, leibniz_residual, vector_form_D
from .convergence import grid_residual, run_study
from .fields import QuatField
from .grid import Ball, GridSpec

__all__ = [
    "Check",
    "SuiteResult",
    "VerifyConfig",
    "SUITES",
    "run_suite",
    "random_points",
    "random_scalar_field",
    "random_quat_field",
    "darboux_pairs",
    "darboux_checks",
    "static_checks",
    "witness_values",
    "DEFAULT_TOLERANCES",
]

DEFAULT_TOLERANCES = {
    "assoc": 1e-12,
    "formula": 1e-14,
    "anticommutator": 1e-14,
    "identity": 1e-10,
    "two_forms": 1e-13,
    "equivalence": 1e-11,
    "bookkeeping": 1e-13,
    "planewave": 1e-13,
    "dirac_exact": 1e-10,
    "riccati": 1e-10,
    "witness": 1e-3,
    "factorization": 1e-9,
    "route": 1e-11,
    "helmholtz": 1e-9,
    "fundamental_grid": 1e-8,
    "static": 1e-9,
    "order_lo": 1.8,
    "order_hi": 2.2,
}


@dataclass
class Check:
    name: str
    passed: bool
    observed: float
    tolerance: float
    comparison: str = "<="
    location: Optional[list] = None
    detail: dict = field(default_factory=dict)


@dataclass
class SuiteResult:
    suite: str
    checks: list
    elapsed: float = 0.0

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def first_failure(self):
        return next((c for c in self.checks if not c.passed), None)

    def to_dict(self):
        return {
            "suite": self.suite,
            "passed": self.passed,
            "n_checks": len(self.checks),
            "checks": [asdict(c) for c in self.checks],
        }


@dataclass
class VerifyConfig:
    seed: int = 42
    profile: Optional[str] = None
    omega: complex = 1.0
    c: Optional[complex] = None
    grid: Optional[GridSpec] = None
    n_points: int = 1000
    n_algebra: int = 100_000
    n_anticommutator: int = 10_000
    tolerances: dict = field(default_factory=dict)

    def tol(self, key):
        return self.tolerances.get(key, DEFAULT_TOLERANCES[key])

    def rng(self, salt=0):
        return np.random.default_rng([self.seed, salt])

    def to_dict(self):
        return {
            "seed": self.seed,
            "profile": self.profile,
            "omega": _json_number(self.omega),
            "c": None if self.c is None else _json_number(self.c),
            "grid": None if self.grid is None else self.grid.metadata(),
            "n_points": self.n_points,
            "tolerances": {k: self.tol(k) for k in sorted(DEFAULT_TOLERANCES)},
        }


def _json_number(z):
    z = complex(z)
    return z.real if z.imag == 0 else {"re": z.real, "im": z.imag}


class _Recorder:
    def __init__(self):
        self.checks = []

    def upper(self, name, values, tol, points=None, **detail):
        """Pass iff ``max(values) <= tol``; remembers where the max occurred."""
        values = np.asarray(values, dtype=float).reshape(-1)
        i = int(np.argmax(values)) if values.size else 0
        obs = float(values[i]) if values.size else 0.0
        loc = None
        if points is not None and values.size:
            loc = [float(c) for c in np.asarray(points).reshape(-1, 3)[i]]
        elif values.size > 1:
            detail = {**detail, "sample_index": i}
        ok = bool(np.isfinite(obs) and obs <= tol)
        self.checks.append(Check(name, ok, obs, float(tol), "<=", loc, detail))
        return ok

    def lower(self, name, value, tol, **detail):
        value = float(value)
        self.checks.append(Check(name, bool(value >= tol), value, float(tol), ">=", None, detail))

    def flag(self, name, ok, **detail):
        self.checks.append(Check(name, bool(ok), float(bool(ok)), 1.0, "==", None, detail))


# -- random inputs ------------------------------------------------------------

def random_points(rng, n, box=1.0, keep_out=(), radius=0.1, max_norm=None):
    """``n`` uniform points in ``[-box, box]^3`` avoiding balls around ``keep_out``."""
    out = np.empty((0, 3))
    while out.shape[0] < n:
        pts = rng.uniform(-box, box, size=(2 * n, 3))
        for s in keep_out:
            pts = pts[np.linalg.norm(pts - np.asarray(s), axis=-1) > radius]
        if max_norm is not None:
            pts = pts[np.linalg.norm(pts, axis=-1) <= max_norm]
        out = np.concatenate([out, pts])
    return out[:n]


def _rc(rng, size=None):
    return rng.uniform(-1, 1, size) + 1j * rng.uniform(-1, 1, size)


def random_scalar_field(rng, terms=3):
    """Trigonometric polynomial ``sum a_m cos(<k_m, x> + b_m)`` with complex ``a_m``."""
    f = F.constant(complex(_rc(rng)))
    for _ in range(terms):
        k = rng.integers(-2, 3, size=3).astype(float)
        f = f + complex(_rc(rng)) * F.cos(F.linear(k, float(rng.uniform(0, 2 * math.pi))))
    return f


def random_quat_field(rng, vector=False, terms=3):
    comps = [random_scalar_field(rng, terms) for _ in range(3)]
    return QuatField.vector(*comps) if vector else QuatField(random_scalar_field(rng, terms), *comps)


def _rel_err(a, b, scale):
    return (a - b).norm_inf() / scale


# -- suites -------------------------------------------------------------------

def suite_algebra(cfg: VerifyConfig) -> SuiteResult:
    rec = _Recorder()
    for a in range(4):
        for b in range(4):
            sign, c = B.MULTIPLICATION_TABLE[a][b]
            expected = sign * B.BASIS[c]
            got = B.BASIS[a] * B.BASIS[b]
            rec.flag(f"table i{a}*i{b}", got == expected and B.mul_table(B.BASIS[a], B.BASIS[b]) == expected)

    rng = cfg.rng(1)
    n = cfg.n_algebra
    p, q, r = (B.Biquaternion.from_array(_rc(rng, (n, 4))) for _ in range(3))
    scale = 1 + p.norm_inf() * q.norm_inf() * r.norm_inf()
    tol = cfg.tol("assoc")
    rec.upper("associativity", _rel_err((p * q) * r, p * (q * r), scale), tol, n=n)
    rec.upper("left distributivity", _rel_err(p * (q + r), p * q + p * r, scale), tol)
    rec.upper("right distributivity", _rel_err((q + r) * p, q * p + r * p, scale), tol)
    a = _rc(rng, n)
    s2 = 1 + np.abs(a) * p.norm_inf() * q.norm_inf()
    rec.upper("C-bilinearity left", _rel_err((a * p) * q, a * (p * q), s2), tol)
    rec.upper("C-bilinearity right", _rel_err(p * (a * q), a * (p * q), s2), tol)
    s3 = 1 + p.norm_inf() * q.norm_inf()
    rec.upper("formula vs table", _rel_err(B.mul(p, q), B.mul_table(p, q), s3), cfg.tol("formula"))

    m = cfg.n_anticommutator
    u, v = _rc(rng, (m, 3)), _rc(rng, (m, 3))
    pu, pv = B.from_vec3(u), B.from_vec3(v)
    anti = (pu * pv + pv * pu) * -0.5
    sd = 1 + np.linalg.norm(u, axis=-1) * np.linalg.norm(v, axis=-1)
    rec.upper(
        "anticommutator scalar product",
        np.abs(B.dot_via_anticommutator(u, v) - B.dot(u, v)) / sd,
        cfg.tol("anticommutator"),
        n=m,
    )
    rec.upper("anticommutator vector part", np.abs(anti.vector).max(axis=-1), cfg.tol("anticommutator"))
    return SuiteResult("algebra", rec.checks)


def _profiles(cfg, default=None):
    if cfg.profile:
        return [M.parse_profile(cfg.profile)]
    if default is not None:
        return [M.make_profile(n) for n in default]
    return M.catalog()


def suite_identities(cfg: VerifyConfig) -> SuiteResult:
    rec = _Recorder()
    rng = cfg.rng(2)
    f = random_quat_field(rng)
    u = random_scalar_field(rng)
    tol = cfg.tol("identity")
    for prof in _profiles(cfg):
        x = random_points(rng, cfg.n_points, keep_out=prof.singular)
        for label, phi in (("sqrt_eps", prof.phi), ("eps", prof.eps)):
            tag = f"{prof.label()} phi={label}"
            rec.upper(f"leibniz [{tag}]", leibniz_residual(phi, f, x).norm_inf(), tol, x)
            rec.upper(f"gauge identity [{tag}]", gauge_identity_residual(phi, f, x).norm_inf(), tol, x)
            dd = apply_D(QuatField.vector(*(F.partial(phi, k) for k in (1, 2, 3))), x)
            rec.upper(f"D^2 = -Lap [{tag}]", (dd + phi.laplacian(x)).norm_inf(), tol, x)
        pf = prof.phi * f
        rec.upper(
            f"D vs vector form [{prof.label()}]",
            (apply_D(pf, x) - vector_form_D(pf, x)).norm_inf(),
            cfg.tol("two_forms"),
            x,
        )
    x = random_points(rng, cfg.n_points)
    dd = apply_D(QuatField.vector(*(F.partial(u, k) for k in (1, 2, 3))), x)
    rec.upper("D^2 = -Lap [random trig scalar]", (dd + u.laplacian(x)).norm_inf(), tol, x)
    return SuiteResult("identities", rec.checks)


def suite_equivalence(cfg: VerifyConfig) -> SuiteResult:
    rec = _Recorder()
    rng = cfg.rng(3)
    E, H = random_quat_field(rng, vector=True), random_quat_field(rng, vector=True)
    src = M.SourceData(random_scalar_field(rng), random_quat_field(rng, vector=True), cfg.omega)
    tol = cfg.tol("equivalence")
    for prof in _profiles(cfg):
        x = random_points(rng, cfg.n_points, keep_out=prof.singular)
        t = M.transform(prof, cfg.omega, x)
        cE, cH = M.scale_fields(E, H, t)
        classical = Q.classical_residuals(E, H, prof, src, x)
        direct = Q.quaternionic_residuals(cE, cH, t, src, x)
        mapped = Q.equivalence_map(classical, t, x)
        tag = f"[{prof.label()}, omega={cfg.omega}]"
        rec.upper(f"map R1 vs direct {tag}", (mapped.R1 - direct.R1).norm_inf(), tol, x)
        rec.upper(f"map R2 vs direct {tag}", (mapped.R2 - direct.R2).norm_inf(), tol, x)
        back = Q.inverse_equivalence_map(direct, t, x)
        inv_err = np.max(
            [Q.node_norms(getattr(back, k) - getattr(classical, k)) for k in ("s1", "s2", "s3", "s4")],
            axis=0,
        )
        rec.upper(f"inverse map round trip {tag}", inv_err, tol, x)

        # scalar part of R1 must come from s1 only, vector part from s2 only
        z1, z3 = np.zeros_like(classical.s1), np.zeros_like(classical.s2)
        only_s1 = Q.equivalence_map(Q.ClassicalResiduals(classical.s1, z3, z1, z3), t, x)
        only_s2 = Q.equivalence_map(Q.ClassicalResiduals(z1, classical.s2, z1, z3), t, x)
        cross_terms = np.maximum(
            Q.node_norms(only_s1.R1.vector), Q.node_norms(only_s2.R1.scalar)
        )
        rec.upper(f"scalar/vector bookkeeping {tag}", cross_terms, cfg.tol("bookkeeping"), x)

    # an exact solution on both sides
    x = random_points(rng, cfg.n_points)
    vac = M.make_profile("vacuum")
    wave = F.exp(-1j * F.coordinate(1))
    E0, H0 = QuatField.vector(0, 0, wave), QuatField.vector(0, -wave, 0)
    s0 = M.SourceData(omega=1.0)
    cl = Q.classical_residuals(E0, H0, vac, s0, x)
    worst = np.max([Q.node_norms(v) for v in cl.as_dict().values()], axis=0)
    rec.upper("vacuum plane wave classical residuals", worst, cfg.tol("planewave"), x)
    t0 = M.transform(vac, 1.0)
    qr = Q.quaternionic_residuals(*M.scale_fields(E0, H0, t0), t0, s0, x)
    rec.upper(
        "vacuum plane wave quaternionic residuals",
        np.maximum(qr.R1.norm_inf(), qr.R2.norm_inf()),
        cfg.tol("planewave"),
        x,
    )
    return SuiteResult("equivalence", rec.checks)


def _const(v):
    return F.constant(v)


def darboux_pairs():
    """(name, phi, psi, v) with ``Lap phi / phi = Lap psi / psi = v`` (constant)."""
    x1, x2, x3 = (F.coordinate(k) for k in (1, 2, 3))
    return [
        ("exp: phi=e^x1, psi=e^-x1", F.exp(x1), F.exp(-x1), 1.0),
        ("plane wave: phi=e^(i x3), psi=e^(i x1)", F.exp(1j * x3), F.exp(1j * x1), -1.0),
        ("exp: phi=e^(x1+x2), psi=e^(sqrt2 x3)", F.exp(x1 + x2), F.exp(math.sqrt(2) * x3), 2.0),
        ("cosh: phi=2cosh(x1), psi=e^x2", F.exp(x1) + F.exp(-x1), F.exp(x2), 1.0),
        ("plane/spherical: phi=e^(i x3), psi=e^(i|x|)/(4pi|x|)", F.exp(1j * x3), Dx.fundamental_psi(1.0), -1.0),
        ("spherical/plane: phi=e^(i|x|)/(4pi|x|), psi=e^(i x2)", M.spherical_wave(1.0), F.exp(1j * x2), -1.0),
    ]


def darboux_checks(cfg: VerifyConfig, rec: _Recorder):
    """Transform outputs solve the operator, exactly and under grid differencing."""
    rng = cfg.rng(4)
    lo, hi = cfg.tol("order_lo"), cfg.tol("order_hi")
    for name, phi, psi, v in darboux_pairs():
        g = Dx.GeneratingFunction.from_phi(phi, _const(v))
        sol = Dx.SchrodingerSolution(psi, _const(v))
        f = Dx.darboux_transform(g, sol)
        singular = F._merge_singular(phi, psi)
        x = random_points(rng, cfg.n_points, keep_out=singular)
        rec.upper(f"schrodinger phi [{name}]", np.abs(g.schrodinger_residual(x)), 1e-12, x)
        rec.upper(f"schrodinger psi [{name}]", np.abs(sol.residual(x)), cfg.tol("identity"), x)
        rec.upper(f"dirac residual exact [{name}]", Dx.dirac_residual(f, g.alpha, x).norm_inf(),
                  cfg.tol("dirac_exact"), x)
        spec = cfg.grid or GridSpec.cube(-1, 1, 17, Ball((0, 0, 0), 0.3) if singular else None)
        study = run_study(grid_residual(lambda s: Dx.dirac_residual_grid(f, g.alpha, s)), spec, levels=3,
                          order_range=(lo, hi))
        ok = study.status == "pass"
        rec.checks.append(Check(
            f"dirac residual grid order [{name}]", ok,
            min(study.orders) if study.orders else float("nan"), lo, "in",
            detail={**study.to_dict(), "range": [lo, hi], "C": study.constant() if study.errors else None},
        ))


def static_checks(cfg: VerifyConfig, rec: _Recorder):
    """Static Maxwell fields built from the transform, checked in the classical system."""
    rng = cfg.rng(7)
    x1, x2 = F.coordinate(1), F.coordinate(2)
    cases = [
        ("vacuum, psi=x1", M.make_profile("vacuum"), x1, 0.0),
        ("exp a=(1,0,0), psi=e^(x2/2)", M.make_profile("exp"), F.exp(0.5 * x2), 0.25),
        ("planewave-phi c=(0,0,1), psi=e^(i x1)", M.make_profile("planewave-phi"), F.exp(1j * x1), -1.0),
        ("planewave-phi c=(0,0,1), psi=spherical(1)", M.make_profile("planewave-phi"),
         Dx.fundamental_psi(1.0), -1.0),
        ("spherical c=1, psi=e^(i x2)", M.make_profile("spherical", c=1.0), F.exp(1j * x2), -1.0),
    ]
    static = M.SourceData(omega=0.0)
    for name, prof, psi, v in cases:
        E = Dx.static_maxwell_solution(prof, Dx.SchrodingerSolution(psi, _const(v)))
        x = random_points(rng, cfg.n_points, keep_out=F._merge_singular(psi, prof.eps))
        cl = Q.classical_residuals(E, QuatField.vector(), prof, static, x)
        rec.upper(f"static div(eps E) [{name}]", np.abs(cl.s1), cfg.tol("static"), x)
        rec.upper(f"static rot E [{name}]", Q.node_norms(cl.s2), cfg.tol("static"), x)


def suite_darboux(cfg: VerifyConfig) -> SuiteResult:
    rec = _Recorder()
    darboux_checks(cfg, rec)
    static_checks(cfg, rec)
    return SuiteResult("darboux", rec.checks)


def _generating_catalog():
    """``(label, phi)`` for the catalog media (phi = sqrt(eps)) and a few extras."""
    items = [(p.label(), p.phi) for p in M.catalog()]
    items.append(("phi=e^(i 2 x3)", F.exp(2j * F.coordinate(3))))
    items.append(("phi=2cosh(x1)", F.exp(F.coordinate(1)) + F.exp(-F.coordinate(1))))
    return items


WITNESS_DELTA = 0.01


def witness_values(cfg: VerifyConfig, rng=None):
    """Riccati residual of ``grad phi / phi + 0.01 i1`` for each generating function.

    Returns ``(label, max residual, points, alpha_1 vanishes identically)``.
    The residual equals ``-2 d alpha_1 - d^2``, so where ``alpha_1 == 0`` it is
    exactly ``d^2``.
    """
    rng = cfg.rng(5) if rng is None else rng
    out = []
    for label, phi in _generating_catalog():
        alpha = M.log_derivative_vector(phi)
        v = Dx.potential_from_phi(phi)
        x = random_points(rng, cfg.n_points, keep_out=phi.singular)
        res = Dx.riccati_residual(alpha + QuatField.vector(WITNESS_DELTA), v, x).norm_inf()
        flat = alpha[1].const == 0 or not np.any(alpha[1].value(x))
        out.append((label, float(res.max()), res, x, flat))
    return out


def suite_riccati(cfg: VerifyConfig) -> SuiteResult:
    rec = _Recorder()
    rng = cfg.rng(5)
    d = WITNESS_DELTA
    us = [("u=1", F.ONE), ("u=x1", F.coordinate(1)), ("u=e^x2", F.exp(F.coordinate(2))),
          ("u=random trig", random_scalar_field(rng))]
    for label, phi in _generating_catalog():
        alpha = M.log_derivative_vector(phi)
        v = Dx.potential_from_phi(phi)
        x = random_points(rng, cfg.n_points, keep_out=phi.singular)
        rec.upper(f"riccati [{label}]", Dx.riccati_residual(alpha, v, x).norm_inf(), cfg.tol("riccati"), x)
        for ulabel, u in us:
            rec.upper(f"factorization [{label}, {ulabel}]",
                      Dx.factorization_residual(u, alpha, v, x).norm_inf(), cfg.tol("factorization"), x)
    for label, worst, res, x, flat in witness_values(cfg):
        if flat:
            # alpha_1 == 0: the perturbation can only contribute d^2
            rec.upper(f"perturbed alpha witness (alpha_1=0, expect d^2) [{label}]",
                      np.abs(res - d * d), 1e-12, x, expected=d * d)
        else:
            rec.lower(f"perturbed alpha witness [{label}]", worst, cfg.tol("witness"))
    return SuiteResult("riccati", rec.checks)


def suite_fundamental(cfg: VerifyConfig) -> SuiteResult:
    rec = _Recorder()
    rng = cfg.rng(6)
    prof = M.parse_profile(cfg.profile or "planewave-phi:c=0,0,1")
    c = complex(cfg.c if cfg.c is not None else 1.0)
    phi = prof.phi
    g = Dx.GeneratingFunction.from_phi(phi)
    excl = 0.1
    keep = [(0.0, 0.0, 0.0)] + list(phi.singular)
    x = random_points(rng, cfg.n_points, box=2.0, keep_out=keep, radius=excl, max_norm=2.0)
    rec.upper("potential = -c^2", np.abs(g.v.value(x) + c * c), cfg.tol("identity"), x)

    psi = Dx.fundamental_psi(c)
    helm = -psi.laplacian(x) - c * c * psi.value(x)
    rec.upper("(-Lap - c^2) psi = 0 off origin", np.abs(helm), cfg.tol("helmholtz"), x)

    f_darboux = Dx.darboux_transform(g, Dx.SchrodingerSolution(psi, F.constant(-c * c)), x)
    closed = Dx.fundamental_solution(g, c, x)
    rec.upper("route equality closed form vs transform", (closed - f_darboux.value(x)).norm_inf(),
              cfg.tol("route"), x)
    f_closed = Dx.fundamental_solution_field(g, c)
    rec.upper("closed-form field vs closed form", (f_closed.value(x) - closed).norm_inf(), cfg.tol("route"), x)
    rec.upper("dirac residual exact (closed-form field)",
              Dx.dirac_residual(f_closed, g.alpha, x).norm_inf(), cfg.tol("fundamental_grid"), x)

    spec = cfg.grid or GridSpec.cube(-2, 2, 33, Ball((0, 0, 0), excl))
    rep = Q.sweep(
        lambda pts: {"dirac": Dx.dirac_residual(f_darboux, g.alpha, pts).coeffs},
        spec,
        profile=prof.label(),
        omega=0.0,
    )
    rec.upper("dirac residual on excluded-ball grid", rep.linf("dirac"), cfg.tol("fundamental_grid"),
              n_valid=rep.n_valid, l2=rep.residuals["dirac"]["l2"])

    # the same field as a static electric field in the medium
    t = M.transform(prof, 0.0)
    st = Q.static_residuals(f_darboux, t, M.SourceData(omega=0.0), x)
    rec.upper("static electric residual of fundamental solution", st.norm_inf(), cfg.tol("fundamental_grid"), x)

    # phi = 1, c = 0: gradient of the Newtonian potential
    g0 = Dx.GeneratingFunction.from_phi(F.ONE)
    newton = -x / (4 * math.pi * np.linalg.norm(x, axis=-1) ** 3)[:, None]
    rec.upper("newtonian case phi=1, c=0", (Dx.fundamental_solution(g0, 0.0, x) - B.from_vec3(newton)).norm_inf(),
              cfg.tol("route"), x)
    return SuiteResult("fundamental", rec.checks)


SUITES = {
    "algebra": suite_algebra,
    "identities": suite_identities,
    "riccati": suite_riccati,
    "darboux": suite_darboux,
    "equivalence": suite_equivalence,
    "fundamental": suite_fundamental,
}


def run_suite(name: str, cfg: VerifyConfig) -> SuiteResult:
    t0 = time.perf_counter()
    result = SUITES[name](cfg)
    result.elapsed = time.perf_counter() - t0
    return result
