import numpy as np
import pytest
from conftest import seeds
from hypothesis import given

from splitgeom import constants
from splitgeom.sasakian import (
    DEFAULT_CONVENTIONS, TAU, Conventions, Sphere, calibrate_conventions, contact_axioms,
    contact_suite, homothety_ratio_residual, horizontal_invariance, omega_hat_agreement,
    su11_invariance_check,
)
from splitgeom.splitquat import ONE, random_unit


@pytest.fixture(scope="module")
def sphere():
    return Sphere(1)


@pytest.fixture(scope="module")
def p(sphere):
    return sphere.random_points(np.random.default_rng(0), 1)[0]


def test_point_check(sphere, p):
    assert sphere.g(p, p) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        sphere.check_point(2 * p)


def test_tangent_projection(sphere, p, rng):
    X = rng.normal(size=sphere.dim)
    Y = sphere.tangent_project(p, X)
    assert abs(sphere.g(p, Y)) <= 1e-12
    assert np.allclose(sphere.tangent_project(p, Y), Y)
    assert np.allclose(sphere.tangent_project(p, p), 0)


def test_reeb_fields(sphere, p):
    for a in range(3):
        X = sphere.reeb(a, p)
        assert sphere.g(X, X) == pytest.approx(TAU[a], abs=1e-10)
        assert abs(sphere.g(p, X)) <= 1e-12
        assert np.max(np.abs(sphere.phi(a, p, X))) <= 1e-12
        for b in range(3):
            assert sphere.eta(a, p, sphere.reeb(b, p)) == pytest.approx(float(a == b), abs=1e-12)


def test_phi_square_law_for_s(sphere, p, rng):
    Y = sphere.tangent_project(p, rng.normal(size=sphere.dim))
    twice = sphere.phi(1, p, sphere.phi(1, p, Y))
    assert np.allclose(twice, Y - sphere.eta(1, p, Y) * sphere.reeb(1, p), atol=1e-12)


def test_reeb_brackets_exact(sphere, p):
    assert sphere.reeb_bracket_residual(p, DEFAULT_CONVENTIONS.bracket_sign) <= 1e-12
    # The opposite global sign is genuinely wrong.
    assert sphere.reeb_bracket_residual(p, -DEFAULT_CONVENTIONS.bracket_sign) > 0.1


def test_contact_axioms_at_point(sphere, p):
    rep = contact_axioms(sphere, p, n_samples=3)
    assert max(rep.phi_square, rep.eta_of_reeb, rep.eta_of_phi, rep.metric_compat, rep.lengths, rep.bracket) <= 1e-10
    assert rep.d_eta <= 1e-6 and rep.normality <= 1e-6


def test_wrong_conventions_are_detected(sphere, p):
    wrong = Conventions(epsilon=(1.0, -1.0, -1.0))
    assert contact_axioms(sphere, p, conv=wrong, with_derivatives=False).phi_square > 0.1
    wrong = Conventions(d_eta=(1.0, -1.0, -1.0))
    assert contact_axioms(sphere, p, conv=wrong).d_eta > 1e-3


def test_calibration_matches_constants():
    conv = calibrate_conventions()
    assert conv.epsilon == tuple(constants.SASAKI_EPSILON)
    assert conv.d_eta == tuple(constants.D_ETA_COEFF)
    assert conv.normality == tuple(constants.NORMALITY_COEFF)
    assert conv.bracket_sign == constants.BRACKET_SIGN


def test_horizontal_space(sphere, p):
    H = sphere.horizontal_basis(p)
    assert H.shape == (4, 8)
    for Y in H:
        assert abs(sphere.g(p, Y)) <= 1e-12
        assert max(abs(sphere.eta(a, p, Y)) for a in range(3)) <= 1e-12
    assert horizontal_invariance(sphere, p) <= 1e-10
    assert omega_hat_agreement(sphere, p) <= 1e-9


def test_su11_invariance(sphere, p):
    assert su11_invariance_check(sphere, p, ONE) == 0.0
    assert su11_invariance_check(sphere, p, -np.asarray(ONE)) <= 1e-14
    assert su11_invariance_check(sphere, p, random_unit(4)) <= 1e-9


def test_homothety(sphere, p):
    assert homothety_ratio_residual(sphere, p, 0.5, 2.0) <= 1e-12


def test_contact_suite_n2():
    rep = contact_suite(2, points=5, seed=1)
    assert max(rep.phi_square, rep.metric_compat, rep.lengths) <= 1e-10
    assert max(rep.d_eta, rep.normality) <= 1e-6


@given(seeds)
def test_axioms_at_random_points(seed):
    sph = Sphere(1)
    q = sph.random_points(np.random.default_rng(seed), 1)[0]
    rep = contact_axioms(sph, q, n_samples=2, seed=seed, with_derivatives=False)
    scale = 1 + np.abs(q).max() ** 2
    assert max(rep.phi_square, rep.eta_of_phi, rep.metric_compat, rep.lengths) <= 1e-10 * scale**2
