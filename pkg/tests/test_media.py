import cmath
import math

import numpy as np
import pytest

from quatmax import fields as F
from quatmax import media as M
from quatmax.errors import BranchError, ConfigurationError, ContractViolation, SingularityError
from quatmax.fields import QuatField
from quatmax.verify import random_points, random_quat_field

x1, x2, x3 = (F.coordinate(k) for k in (1, 2, 3))
PTS = np.random.default_rng(9).uniform(-1, 1, size=(200, 3))


def test_log_derivative_examples():
    assert np.allclose(M.log_derivative_vector(F.exp(x1)).value(PTS).coeffs, [0, 1, 0, 0])
    c = 1.7
    a = M.log_derivative_vector(F.exp(1j * c * x3)).value(PTS).coeffs
    assert np.allclose(a, [0, 0, 0, 1j * c])
    newton = F.reciprocal(4 * math.pi * F.radius())
    got = M.log_derivative_vector(newton).value(PTS).vector
    assert np.allclose(got, -PTS / np.sum(PTS**2, axis=1)[:, None])


def test_log_derivative_rejects_zero():
    with pytest.raises(SingularityError):
        M.log_derivative_vector(x1).value(np.array([0.0, 0.2, 0.3]))


def test_vacuum_transform():
    t = M.transform(M.make_profile("vacuum"), 1.0, PTS)
    assert np.all(t.eps_vec.value(PTS).coeffs == 0)
    assert np.all(t.mu_vec.value(PTS).coeffs == 0)
    assert np.all(t.k.value(PTS) == 1)


def test_exponential_profiles_give_constant_coefficients():
    t = M.transform(M.make_profile("exp"), 1.0, PTS)
    assert np.allclose(t.eps_vec.value(PTS).coeffs, [0, 0.5, 0, 0], atol=1e-15)
    omega = 2.0
    t = M.transform(M.make_profile("product-exp"), omega, PTS)
    ev, mv = t.eps_vec.value(PTS).coeffs, t.mu_vec.value(PTS).coeffs
    assert np.ptp(ev, axis=0).max() <= 1e-13 and np.ptp(mv, axis=0).max() <= 1e-13
    assert np.allclose(ev[0], [0, 0.5, 1, 0]) and np.allclose(mv[0], [0, 0, 0, 0.5])
    k = omega * np.exp((PTS[:, 0] + 2 * PTS[:, 1] + PTS[:, 2]) / 2)
    assert np.allclose(t.k.value(PTS), k, rtol=1e-14)


@pytest.mark.parametrize("prof", M.catalog(), ids=lambda p: p.name)
def test_derived_quantity_invariants(prof):
    x = random_points(np.random.default_rng(1), 300, keep_out=prof.singular)
    omega = 1.3
    t = M.transform(prof, omega, x)
    eps, mu = prof.eps.value(x), prof.mu.value(x)
    se, sm = t.sqrt_eps.value(x), t.sqrt_mu.value(x)
    assert np.all(np.abs(se * se - eps) <= 1e-12 * np.abs(eps))
    assert np.all(np.abs(sm * sm - mu) <= 1e-12 * np.abs(mu))
    half_log = prof.eps.gradient(x) / (2 * eps[:, None])
    assert np.abs(t.eps_vec.value(x).vector - half_log).max() <= 1e-12 * max(1, np.abs(half_log).max())
    k = t.k.value(x)
    assert np.all(np.abs(k * k - omega**2 * eps * mu) <= 1e-12 * np.abs(omega**2 * eps * mu))


def test_scale_fields():
    E = QuatField.vector(0, 1, 0)
    prof = M.MediumProfile("sq", F.exp(2 * x1), F.ONE, sqrt_eps=F.exp(x1), sqrt_mu=F.ONE)
    t = M.transform(prof, 1.0, PTS)
    cE, cH = M.scale_fields(E, E, t)
    assert np.allclose(cE.value(PTS).coeffs[:, 2], np.exp(PTS[:, 0]))
    rng = np.random.default_rng(4)
    E, H = random_quat_field(rng, vector=True), random_quat_field(rng, vector=True)
    tv = M.transform(M.make_profile("vacuum"))
    cE, cH = M.scale_fields(E, H, tv)
    assert cE.value(PTS) == E.value(PTS) and cH.value(PTS) == H.value(PTS)
    t2 = M.transform(M.make_profile("product-exp"))
    bE, bH = M.unscale_fields(*M.scale_fields(E, H, t2), t2)
    assert (bE.value(PTS) - E.value(PTS)).norm_inf().max() <= 1e-12
    with pytest.raises(ContractViolation):
        M.scale_fields(QuatField(1, x1), H, t2)


def test_catalog_examples():
    vac = M.make_profile("vacuum")
    assert vac.eps.value(PTS).tolist() == [1] * 200
    assert np.allclose(M.make_profile("exp", a=(1, 0, 0), d=0).eps.value(PTS), np.exp(PTS[:, 0]))
    sph = M.make_profile("spherical", c=2)
    x = np.array([0.6, 0.0, 0.8])
    assert sph.phi.value(x) == pytest.approx(cmath.exp(2j) / (4 * math.pi), rel=1e-14)
    assert list(sph.singular) == [(0.0, 0.0, 0.0)]
    assert [p.name for p in M.catalog()] == list(M.PROFILE_NAMES)


def test_parse_profile():
    assert M.parse_params("a=1,0,0,d=0.5") == {"a": (1.0, 0.0, 0.0), "d": 0.5}
    assert M.parse_params("c=1+2i") == {"c": 1 + 2j}
    p = M.parse_profile("exp:a=0,1,0,d=1")
    assert p.label() == "exp:a=0.0,1.0,0.0,d=1.0,b=0.0,0.0,0.0,e=0.0"
    assert np.allclose(p.eps.value(PTS), np.exp(PTS[:, 1] + 1))
    assert M.parse_profile(p.label()).label() == p.label()
    for bad in ("nope", "exp:a=1", "exp:zz=1", "exp:a=x,0,0", "vacuum:,1"):
        with pytest.raises(ConfigurationError):
            M.parse_profile(bad)


def test_principal_branch_is_enforced():
    # eps = -1 + i s x1 straddles the cut as x1 changes sign
    prof = M.MediumProfile("cut", -1 + 0.1j * x1, F.ONE)
    x = np.array([[-0.5, 0, 0], [0.5, 0, 0]])
    with pytest.raises(BranchError) as info:
        M.transform(prof, 1.0, x)
    assert info.value.location is not None
    one_side = np.array([[0.2, 0, 0], [0.5, 0, 0]])
    t = M.transform(prof, 1.0, one_side)
    assert np.allclose(t.sqrt_eps.value(one_side) ** 2, prof.eps.value(one_side))
    with pytest.raises(ContractViolation):
        M.transform(M.MediumProfile("wrong", F.exp(x1), F.ONE, sqrt_eps=F.exp(x1)), 1.0, PTS)


def test_source_current_must_be_vectorial():
    with pytest.raises(ContractViolation):
        M.SourceData(j=QuatField(1))
