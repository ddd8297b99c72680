import csv

import numpy as np
import pytest

from quatmax import fields as F
from quatmax.calculus import apply_D
from quatmax.convergence import D_error_on_grid, run_study
from quatmax.errors import ConfigurationError
from quatmax.fields import QuatField
from quatmax.grid import CSV_HEADER, Ball, GridField, GridSpec, apply_D_grid, sample

x1, x2, x3 = (F.coordinate(k) for k in (1, 2, 3))


def test_spec_geometry():
    s = GridSpec.cube(-1, 1, 33)
    assert s.h == pytest.approx(1 / 16)
    assert s.upper == pytest.approx((1, 1, 1))
    assert s.nodes().shape == (33, 33, 33, 3)
    r = s.refined(2)
    assert r.counts == (65, 65, 65)
    assert np.array_equal(r.nodes()[::2, ::2, ::2], s.nodes())


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(origin=(0, 0, 0), h=0.0, counts=(3, 3, 3)),
        dict(origin=(0, 0, 0), h=0.1, counts=(0, 3, 3)),
        dict(origin=(0, 0, 0), h=0.1, counts=(5, 5, 5), exclusion=Ball((0, 0, 0), 0.1)),
    ],
)
def test_bad_specs_are_configuration_errors(kwargs):
    with pytest.raises(ConfigurationError):
        GridSpec(**kwargs)


def test_linear_field_is_differenced_exactly():
    spec = GridSpec((-0.3, 0.1, 0.2), 0.07, (6, 7, 8))
    g = apply_D_grid(sample(QuatField(x1), spec))
    assert g.valid.sum() == 4 * 5 * 6
    assert np.allclose(g.values[g.valid], [0, 1, 0, 0], atol=1e-12, rtol=0)
    assert not g.valid[0].any() and not g.valid[-1].any()


def test_quadratic_field_is_differenced_exactly():
    spec = GridSpec.cube(-1, 1, 9)
    g = apply_D_grid(sample(QuatField(x1 * x1), spec))
    pts = spec.nodes()[g.valid]
    expected = np.zeros((len(pts), 4), dtype=complex)
    expected[:, 1] = 2 * pts[:, 0]
    assert np.abs(g.values[g.valid] - expected).max() <= 1e-12


def test_second_order_on_sin():
    f = QuatField(F.sin(x1))
    res = D_error_on_grid(f)
    errs = [res(GridSpec.cube(-1, 1, n))[0].max() for n in (21, 41)]
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.1)


def test_exclusion_ball_invalidates_stencils_touching_it():
    spec = GridSpec.cube(-1, 1, 21, Ball((0, 0, 0), 0.25))
    s = sample(QuatField.vector(F.reciprocal(F.radius())), spec)
    nodes = spec.nodes()
    r = np.linalg.norm(nodes, axis=-1)
    assert not s.valid[r <= 0.25].any()
    assert np.all(s.values[~s.valid] == 0)
    g = apply_D_grid(s)
    expected = np.zeros(spec.counts, dtype=bool)
    for i, j, k in np.ndindex(*spec.counts):
        if min(i, j, k) == 0 or max(i, j, k) == 20:
            continue
        stencil = [(i, j, k)] + [
            tuple(c + d * (a == axis) for a, c in enumerate((i, j, k)))
            for axis in range(3)
            for d in (-1, 1)
        ]
        expected[i, j, k] = all(r[n] > 0.25 for n in stencil)
    assert np.array_equal(g.valid, expected)


def test_singular_node_without_exclusion_is_rejected():
    with pytest.raises(ConfigurationError):
        sample(QuatField.vector(F.radius()), GridSpec.cube(-1, 1, 5))


def test_too_small_grid_is_rejected():
    with pytest.raises(ConfigurationError):
        apply_D_grid(sample(QuatField(x1), GridSpec((0, 0, 0), 0.1, (2, 5, 5))))


def test_csv_round_trip(tmp_path):
    spec = GridSpec.cube(-1, 1, 5, Ball((0, 0, 0), 0.3))
    f = QuatField(F.exp(1j * x1), x2, 1j * x3, F.cos(x1 + x2))
    g = sample(f, spec)
    path = tmp_path / "f.csv"
    g.to_csv(path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 1 + 125
    assert {r[-1] for r in rows[1:]} == {"0", "1"}
    back = GridField.read_csv(path, spec)
    assert np.array_equal(back.values, g.values)
    assert np.array_equal(back.valid, g.valid)


def test_grid_D_matches_exact_D_to_truncation_error():
    f = QuatField(F.exp(x2), F.sin(x1), x3 * x1, F.cos(x3))
    spec = GridSpec.cube(-1, 1, 41)
    g = apply_D_grid(sample(f, spec))
    exact = apply_D(f, spec.nodes()[g.valid]).coeffs
    assert np.abs(g.values[g.valid] - exact).max() < 0.5 * spec.h**2 * 3


def test_convergence_statuses():
    spec = GridSpec.cube(-1, 1, 11)
    assert run_study(D_error_on_grid(QuatField(x1, x2)), spec, levels=3).status == "exact"
    assert run_study(D_error_on_grid(QuatField(F.sin(x1))), spec, levels=3).status == "pass"

    def flat(s):
        return np.ones(s.counts), np.ones(s.counts, dtype=bool)

    assert run_study(flat, spec).status == "inconclusive"

    def first_order(s):
        return np.full(s.counts, s.h), np.ones(s.counts, dtype=bool)

    res = run_study(first_order, spec, levels=3)
    assert res.status == "fail"
    assert res.orders == pytest.approx([1, 1])
