import json

import numpy as np
import pytest

from quatmax import fields as F
from quatmax import maxwellq as Q
from quatmax import media as M
from quatmax.biquat import Biquaternion, mul
from quatmax.calculus import apply_D
from quatmax.errors import ConfigurationError, ContractViolation
from quatmax.fields import QuatField
from quatmax.grid import Ball, GridSpec
from quatmax.verify import random_points, random_quat_field, random_scalar_field

x1, x2, x3 = (F.coordinate(k) for k in (1, 2, 3))
PTS = np.random.default_rng(21).uniform(-1, 1, size=(300, 3))
VACUUM = M.make_profile("vacuum")


def plane_wave():
    w = F.exp(-1j * x1)
    return QuatField.vector(0, 0, w), QuatField.vector(0, -w, 0)


def worst(res):
    return max(Q.node_norms(v).max() for v in res.as_dict().values())


def test_vacuum_plane_wave_solves_both_systems():
    E, H = plane_wave()
    s = M.SourceData(omega=1.0)
    assert worst(Q.classical_residuals(E, H, VACUUM, s, PTS)) <= 1e-13
    t = M.transform(VACUUM, 1.0)
    assert worst(Q.quaternionic_residuals(*M.scale_fields(E, H, t), t, s, PTS)) <= 1e-13


def test_zero_fields_give_zero_residuals():
    z = QuatField.vector()
    s = M.SourceData(omega=1.0)
    assert worst(Q.classical_residuals(z, z, M.make_profile("exp"), s, PTS)) == 0
    t = M.transform(M.make_profile("exp"))
    assert worst(Q.quaternionic_residuals(z, z, t, s, PTS)) == 0


def test_divergence_balances_charge():
    E = QuatField.vector(x1)
    cl = Q.classical_residuals(E, QuatField.vector(), VACUUM, M.SourceData(omega=0.0), PTS)
    assert np.all(cl.s1 == 1)
    cl = Q.classical_residuals(E, QuatField.vector(), VACUUM, M.SourceData(F.ONE, omega=0.0), PTS)
    assert worst(cl) == 0


def test_map_hand_values():
    t = M.transform(VACUUM)
    zero_s, zero_v = np.zeros(1, complex), np.zeros((1, 3), complex)
    out = Q.equivalence_map(Q.ClassicalResiduals(zero_s, zero_v, zero_s, zero_v), t, PTS[:1])
    assert out.R1 == Biquaternion.from_array(np.zeros((1, 4))) and out.R2 == out.R1
    s2 = np.array([[0, 1, 0]], complex)
    out = Q.equivalence_map(Q.ClassicalResiduals(zero_s, s2, zero_s, zero_v), t, PTS[:1])
    assert out.R1.coeffs.tolist() == [[0, 0, 1, 0]]


def _residual_setup(profile, omega=1.0, seed=0):
    rng = np.random.default_rng(seed)
    E, H = random_quat_field(rng, vector=True), random_quat_field(rng, vector=True)
    src = M.SourceData(random_scalar_field(rng), random_quat_field(rng, vector=True), omega)
    x = random_points(rng, 400, keep_out=profile.singular)
    t = M.transform(profile, omega, x)
    return E, H, src, x, t


@pytest.mark.parametrize("name", ["vacuum", "exp", "product-exp", "planewave-phi", "spherical"])
@pytest.mark.parametrize("omega", [1.0, 2.5, 0.7 + 0.1j])
def test_map_reproduces_direct_residuals(name, omega):
    prof = M.make_profile(name)
    E, H, src, x, t = _residual_setup(prof, omega)
    classical = Q.classical_residuals(E, H, prof, src, x)
    direct = Q.quaternionic_residuals(*M.scale_fields(E, H, t), t, src, x)
    mapped = Q.equivalence_map(classical, t, x)
    assert (mapped.R1 - direct.R1).norm_inf().max() <= 1e-11
    assert (mapped.R2 - direct.R2).norm_inf().max() <= 1e-11
    back = Q.inverse_equivalence_map(direct, t, x)
    for k, v in classical.as_dict().items():
        assert Q.node_norms(getattr(back, k) - v).max() <= 1e-11


def test_map_detects_wrong_multiplication_side_and_sign():
    """Left multiplication or a flipped ik term must break the identity."""
    prof = M.make_profile("product-exp")
    E, H, src, x, t = _residual_setup(prof, 1.0, seed=3)
    cE, cH = M.scale_fields(E, H, t)
    mapped = Q.equivalence_map(Q.classical_residuals(E, H, prof, src, x), t, x)
    e, h, k = cE.value(x), cH.value(x), t.k.value(x)
    base = apply_D(cE, x) + src.rho.value(x) / t.sqrt_eps.value(x)
    right = base + mul(e, t.eps_vec.value(x)) + (1j * k) * h
    left = base + mul(t.eps_vec.value(x), e) + (1j * k) * h
    flipped = base + mul(e, t.eps_vec.value(x)) - (1j * k) * h
    assert (right - mapped.R1).norm_inf().max() <= 1e-11
    assert (left - mapped.R1).norm_inf().max() > 1e-3
    assert (flipped - mapped.R1).norm_inf().max() > 1e-3


def test_static_residuals():
    t = M.transform(M.make_profile("exp"), 0.0)
    s = M.SourceData(omega=0.0)
    assert Q.static_residuals(QuatField.vector(), t, s, PTS).norm_inf().max() == 0
    with pytest.raises(ContractViolation):
        Q.static_residuals(QuatField.vector(), M.transform(VACUUM, 1.0), s, PTS)
    with pytest.raises(ContractViolation):
        Q.static_residuals(QuatField.vector(), t, M.SourceData(omega=1.0), PTS)


def test_sweep_exact_solution_and_zero_fields():
    E, H = plane_wave()
    t = M.transform(VACUUM, 1.0)
    cE, cH = M.scale_fields(E, H, t)
    src = M.SourceData(omega=1.0)
    spec = GridSpec.cube(-1, 1, 33)
    rep = Q.sweep(lambda p: Q.quaternionic_residuals(cE, cH, t, src, p).as_dict(), spec)
    assert rep.linf() <= 1e-10
    z = QuatField.vector()
    rep0 = Q.sweep(lambda p: Q.quaternionic_residuals(z, z, t, src, p).as_dict(), spec)
    assert rep0.residuals == {"R1": {"linf": 0.0, "l2": 0.0}, "R2": {"linf": 0.0, "l2": 0.0}}


def test_grid_residual_shrinks_fourfold_under_halving():
    E, H = plane_wave()
    t = M.transform(VACUUM, 1.0)
    cE, cH = M.scale_fields(E, H, t)
    src = M.SourceData(omega=1.0)
    errs = []
    for n in (17, 33):
        g = Q.quaternionic_residuals_grid(cE, cH, t, src, GridSpec.cube(-1, 1, n))["R1"]
        errs.append(g.biquaternions().norm_inf()[g.valid].max())
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.1)


def test_sweep_is_independent_of_threads_and_chunking(monkeypatch):
    prof = M.make_profile("spherical")
    E, H, src, _, t = _residual_setup(prof, 1.0, seed=8)
    cE, cH = M.scale_fields(E, H, t)
    spec = GridSpec.cube(-1, 1, 17, Ball((0, 0, 0), 0.2))

    def ev(p):
        return Q.quaternionic_residuals(cE, cH, t, src, p).as_dict()

    one = Q.sweep(ev, spec, threads=1).to_json()
    many = Q.sweep(ev, spec, threads=4, chunk=257).to_json()
    assert one == many
    monkeypatch.setenv("QUATMAX_THREADS", "3")
    assert Q.thread_count() == 3
    assert Q.sweep(ev, spec, chunk=100).to_json() == one


def test_thread_env_validation(monkeypatch):
    monkeypatch.setenv("QUATMAX_THREADS", "0")
    assert Q.thread_count() >= 1
    for bad in ("-1", "many"):
        monkeypatch.setenv("QUATMAX_THREADS", bad)
        with pytest.raises(ConfigurationError):
            Q.thread_count()


def test_report_schema_and_norm_relations():
    prof = M.make_profile("exp")
    E, H, src, _, t = _residual_setup(prof, 1.0, seed=2)
    spec = GridSpec.cube(-1, 1, 9)
    rep = Q.sweep(
        lambda p: Q.classical_residuals(E, H, prof, src, p).as_dict(), spec, profile=prof.label(), omega=1.0
    )
    doc = json.loads(rep.to_json())
    assert set(doc) == {"profile", "omega", "grid", "n_valid", "residuals"}
    assert doc["grid"] == {"origin": [-1.0] * 3, "h": 0.25, "counts": [9, 9, 9], "exclusion": None}
    assert doc["n_valid"] == 729
    for r in doc["residuals"].values():
        assert 0 <= r["l2"] <= np.sqrt(729) * r["linf"] + 1e-12
        assert r["linf"] <= r["l2"]


def test_sweep_with_no_valid_nodes():
    spec = GridSpec.cube(-1, 1, 3)
    with pytest.raises(ConfigurationError):
        Q.sweep(lambda p: {"r": p[:, 0]}, spec, mask=np.zeros(spec.counts, dtype=bool))
