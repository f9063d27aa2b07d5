import json

import numpy as np
import pytest
from conftest import imag
from hypothesis import given

from splitgeom.liealg import (
    DimensionMismatch, LieAlgebra, abelian, bracket, check_algebra, inner, load_algebra,
    save_algebra, su2, su2_from_matrix, su2_to_matrix,
)

L = su2()
e1, e2, e3 = (L.basis(k) for k in range(3))


def test_su2_brackets():
    assert np.array_equal(bracket(L, e1, e2).coords, e3.coords)
    assert np.array_equal(bracket(L, e2, e3).coords, e1.coords)
    assert np.array_equal(bracket(L, e1, e1).coords, np.zeros(3))
    assert np.array_equal(bracket(L, e1 + e2, e2).coords, e3.coords)


def test_inner_and_ad_invariance_example():
    assert inner(L, e1, e1) == 1.0
    assert inner(L, bracket(L, e1, e2), e3) == inner(L, e1, bracket(L, e2, e3)) == 1.0


def test_check_algebra():
    rep = check_algebra(L)
    assert rep.passed
    assert rep.jacobi == rep.antisymmetry == rep.ad_invariance == 0.0
    assert check_algebra(abelian(4)).passed


def test_broken_algebra_fails_check():
    c = L.c.copy()
    c[0, 1, 2] = 2.0  # breaks antisymmetry
    assert not check_algebra(LieAlgebra(3, c, np.eye(3))).passed


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        bracket(L, np.zeros(2), np.zeros(3))
    with pytest.raises(DimensionMismatch):
        LieAlgebra(3, np.zeros((2, 2, 2)), np.eye(3))


def test_json_roundtrip(tmp_path):
    path = tmp_path / "su2.json"
    save_algebra(L, path)
    L2 = load_algebra(path)
    assert L2 == L
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 3, "c": L.c.tolist()}))
    with pytest.raises(ValueError):
        load_algebra(bad)
    assert load_algebra("u1^2").dim == 2


def test_matrix_realisation_matches_constants():
    for i in range(3):
        for j in range(3):
            X, Y = su2_to_matrix(np.eye(3)[i]), su2_to_matrix(np.eye(3)[j])
            assert np.allclose(su2_from_matrix(X @ Y - Y @ X), L.bracket_arrays(np.eye(3)[i], np.eye(3)[j]))


@given(imag, imag, imag)
def test_ad_invariance_and_jacobi(x, y, z):
    b = L.bracket_arrays
    lhs = L.inner_arrays(b(x, y), z)
    rhs = L.inner_arrays(x, b(y, z))
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))
    jac = b(x, b(y, z)) + b(y, b(z, x)) + b(z, b(x, y))
    assert np.max(np.abs(jac)) <= 1e-12 * (1 + np.max(np.abs(x)) ** 3)
