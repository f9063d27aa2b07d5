import numpy as np
import pytest
from conftest import imag, quat, seeds
from hypothesis import given

from splitgeom.splitquat import (
    I, ONE, S, T, Causal, ImSplit, NotUnit, NullDivisor, SplitQuaternion,
    adjoint_matrix, classify, conj, inner, inverse, mul, mul_arrays, norm_sq, random_unit,
)

J = np.diag([1.0, -1.0, -1.0])


@pytest.mark.parametrize(
    "p, q, expected",
    [
        (I, I, -ONE), (S, S, ONE), (T, T, ONE),
        (I, S, T), (S, I, -T), (T, S, I), (S, T, -I), (I, T, -S), (T, I, S),
    ],
)
def test_basis_products(p, q, expected):
    assert mul(p, q) == expected


def test_zero_divisor():
    assert mul(ONE + S, ONE - S) == SplitQuaternion(0, 0, 0, 0)


def test_norms_of_basis():
    assert norm_sq(I) == 1.0
    assert norm_sq(S) == -1.0
    assert norm_sq(ONE + S) == 0.0
    assert norm_sq(ImSplit(1.0, 1.0, 0.0)) == 0.0


def test_conj_and_inner():
    p = SplitQuaternion(1, 2, 3, 4)
    assert conj(p) == SplitQuaternion(1, -2, -3, -4)
    assert inner(p, p) == pytest.approx(norm_sq(p))


def test_inverse():
    assert inverse(I) == -I
    with pytest.raises(NullDivisor):
        inverse(ONE + S)
    q = random_unit(7)
    assert np.allclose(np.asarray(mul(q, inverse(q))), [1, 0, 0, 0], atol=1e-12)


def test_classify():
    assert classify(ImSplit(1, 0, 0)) is Causal.SPACELIKE
    assert classify(ImSplit(0, 1, 0)) is Causal.TIMELIKE
    assert classify(ImSplit(1, 1, 0)) is Causal.NULL


def test_adjoint_of_i():
    assert np.allclose(adjoint_matrix(I), np.diag([1.0, -1.0, -1.0]))


def test_adjoint_rejects_non_unit():
    with pytest.raises(NotUnit):
        adjoint_matrix(S)


def test_random_unit_deterministic():
    a, b = random_unit(3), random_unit(3)
    assert a == b
    assert abs(norm_sq(a) - 1.0) <= 1e-12
    assert a.w > 0


@given(quat, quat)
def test_norm_multiplicative(p, q):
    lhs = norm_sq(mul_arrays(p, q))
    rhs = norm_sq(p) * norm_sq(q)
    assert abs(lhs - rhs) <= 1e-10 * (1 + abs(rhs))


@given(quat, quat, quat)
def test_associative(p, q, r):
    a = mul_arrays(mul_arrays(p, q), r)
    b = mul_arrays(p, mul_arrays(q, r))
    assert np.allclose(a, b, atol=1e-12 * (1 + np.abs(a).max()))


@given(quat, quat)
def test_conj_reverses_products(p, q):
    assert np.allclose(np.asarray(conj(mul_arrays(p, q))), mul_arrays(np.asarray(conj(q)), np.asarray(conj(p))))


@given(imag)
def test_imaginary_square(x):
    xi = np.concatenate([[0.0], x])
    sq = mul_arrays(xi, xi)
    assert np.allclose(sq, [-norm_sq(ImSplit(*x)), 0, 0, 0], atol=1e-12)


@given(seeds, seeds)
def test_adjoint_is_homomorphism_into_so_plus(s1, s2):
    p, q = random_unit(s1), random_unit(s2)
    Mp, Mq = adjoint_matrix(p), adjoint_matrix(q)
    assert np.allclose(adjoint_matrix(p * q), Mp @ Mq, atol=1e-10 * (1 + np.abs(Mp @ Mq).max()))
    assert np.allclose(Mp.T @ J @ Mp, J, atol=1e-10 * (1 + np.abs(Mp).max() ** 2))
    assert np.linalg.det(Mp) == pytest.approx(1.0, rel=1e-8)
    assert Mp[0, 0] >= 1.0 - 1e-12
    assert np.allclose(adjoint_matrix(-p), Mp)
