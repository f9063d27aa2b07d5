import numpy as np
import pytest
from conftest import imag, seeds
from hypothesis import given

from splitgeom import permuting as pm
from splitgeom.bmodule import CALIBRATED, gram, lambda_apply, metric
from splitgeom.splitquat import random_unit


def point(seed, n_entries=2):
    return pm.random_spacelike(np.random.default_rng(seed), n_entries, 1)[0]


def test_flat_point_rejects_non_spacelike():
    with pytest.raises(ValueError):
        pm.FlatPoint(np.array([0.0, 0.0, 1.0, 0.0]))
    assert pm.FlatPoint(np.array([1.0, 0.0, 0.0, 0.0])).n == 1


def test_fundamental_field_matches_action_curve():
    h = point(1)
    for xi in np.eye(3):
        step = 1e-5
        fd = (pm.act(h, pm.exp_im(xi, step)) - pm.act(h, pm.exp_im(xi, -step))) / (2 * step)
        assert np.max(np.abs(fd - pm.fundamental_field(xi, h))) <= 1e-8
    assert np.array_equal(pm.fundamental_field(np.zeros(3), h), np.zeros_like(h))


@given(imag, imag)
def test_fundamental_field_linear(x, y):
    h = point(2)
    lhs = pm.fundamental_field(x + 2 * y, h)
    assert np.allclose(lhs, pm.fundamental_field(x, h) + 2 * pm.fundamental_field(y, h))


def test_decompose_examples(rng):
    v = rng.normal(size=5)
    d = pm.decompose(np.einsum("ab,v->abv", pm.G_SP, v))
    assert np.allclose(d.trace, 3 * v) and np.allclose(d.alt.m, 0) and np.allclose(d.sym0.m, 0)
    A = rng.normal(size=(3, 3))
    A = A - A.T
    d = pm.decompose(A)
    assert d.trace == 0 and np.array_equal(d.alt.m, A) and np.allclose(d.sym0.m, 0)
    T = rng.normal(size=(3, 3, 4))
    assert np.max(np.abs(pm.decompose(T).reassemble().m - T)) <= 1e-14


def test_chi_parts_on_flat_model():
    h = point(3)
    parts = pm.chi_parts(h)
    assert np.max(np.abs(parts.chi2.m)) <= 1e-12
    assert np.allclose(parts.chi0, h, atol=1e-12)


@given(imag)
def test_chi_along_null_direction_is_null(xi2):
    h = point(4)
    xi = np.array([1.0, 0.6, 0.8])  # null: 1 - 0.36 - 0.64
    v = pm.chi(h).pair(xi, xi2)
    assert abs(metric(v, v)) <= 1e-9 * (1 + np.abs(v).max() ** 2)


def test_euler_field():
    h = point(5)
    E = pm.euler(h)
    assert np.allclose(E, h)
    assert metric(E, E) == pytest.approx(2 * pm.rho0(h), rel=1e-13)
    assert np.allclose(pm.euler(3 * h), 3 * E)
    # -I_xi K_xi = N(xi) E for every xi, so the sign flips on timelike directions.
    for xi, sign in (([np.cosh(0.7), np.sinh(0.7), 0.0], 1.0), ([0.0, 1.0, 0.0], -1.0), ([0.3, np.cosh(1.1), np.sinh(1.1) * 0.0], -1.0)):
        xi = np.asarray(xi, float)
        nrm = xi[0] ** 2 - xi[1] ** 2 - xi[2] ** 2
        got = -lambda_apply(xi, pm.fundamental_field(xi, h)).entries
        assert np.allclose(got, nrm * E)
        assert np.sign(nrm) == sign


def test_rho_examples():
    h = point(6)
    h1 = h / np.sqrt(metric(h, h))
    r = pm.rho(h1)
    assert r.rho0 == pytest.approx(0.5, abs=1e-13)
    assert np.max(np.abs(r.rho2)) <= 1e-12
    assert pm.rho(2 * h).rho0 == pytest.approx(4 * pm.rho(h).rho0, rel=1e-13)


def test_gamma_quadratic_and_nonzero():
    h = point(7)
    g = pm.gamma(h).m
    assert np.max(np.abs(g)) > 0
    # entries are covectors of a field linear in h, so they scale linearly;
    # pairing with a second linear field gives the quadratic rho.
    assert np.allclose(pm.gamma(2 * h).m, 2 * g)
    assert np.allclose(pm.rho_matrix(2 * h), 4 * pm.rho_matrix(h))


def test_kappa_relations():
    h = point(8)
    r0 = pm.rho0(h)
    assert pm.kappa([1, 0, 0], h) == pytest.approx(r0, abs=1e-12)
    assert pm.kappa([0, 1, 0], h) == pytest.approx(-r0, abs=1e-12)
    assert pm.kappa([0, 0, 1], h) == pytest.approx(-r0, abs=1e-12)
    with pytest.raises(pm.NullDirection):
        pm.kappa([1, 1, 0], h)


@pytest.mark.parametrize("xi", list(np.eye(3)))
def test_derivative_identities(xi):
    h = point(9)
    assert pm.dkappa_residual(xi, h) <= 1e-6
    assert pm.potential_check(h, xi) <= 1e-6


def test_gamma1_identities():
    h = point(10)
    assert pm.gamma1_vs_iota_euler(h) <= 1e-12
    assert pm.d_gamma1_residual(h) <= 1e-6
    assert pm.hessian_residual(h) <= 1e-6


def test_gradient_is_dual_of_euler():
    h = point(11)
    grad = pm.fd_gradient(pm.rho0_from_rho, h)
    assert np.max(np.abs(grad - gram(2) @ pm.euler(h).reshape(-1))) <= 1e-8


@given(seeds)
def test_rho0_invariances(seed):
    h = point(seed % 1000)
    q = np.asarray(random_unit(seed, scale=0.7))
    r0 = pm.rho(h).rho0
    assert pm.rho(pm.act(h, q)).rho0 == pytest.approx(r0, rel=1e-10)
    u = 0.37
    assert pm.rho(np.exp(u) * h).rho0 == pytest.approx(np.exp(2 * u) * r0, rel=1e-12)


def test_calibration_selects_unique_table():
    table, scores = pm.calibrate_sign_table(n_points=20)
    assert table == CALIBRATED
    assert sum(s.passed for s in scores) == 1
    # The table conjugating only i keeps the relations but not rho_2 = 0.
    by_name = {str(s.table): s for s in scores}
    assert by_name["(-,+,+)"].relations == 0.0 and by_name["(-,+,+)"].rho2 > 1.0
