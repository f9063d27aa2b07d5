"""The left B-module B^n: neutral metric, structures I, S, T, and the
Sp(n,B) x Sp(1,B) action (A, xi) . q = A q conj(xi).

A ``BVector`` is stored as a real array of shape (n, 4); most functions here
accept anything ``np.asarray`` turns into that shape.  The structure
lambda(xi) acts by right multiplication by sigma_1 xi_1 i + sigma_2 xi_2 s +
sigma_3 xi_3 t, with the signs sigma taken from a ``SignTable``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .splitquat import (
    MUL_TABLE,
    QFORM,
    SplitQuaternion,
    conj_arrays,
    mul_arrays,
    norm_sq_arrays,
    right_mul_matrix,
)

SP_TOL = 1e-10


class NotSymplectic(ValueError):
    pass


@dataclass(frozen=True)
class SignTable:
    signs: tuple[int, int, int]

    def __post_init__(self):
        if len(self.signs) != 3 or any(s not in (1, -1) for s in self.signs):
            raise ValueError(f"sign table must be three entries of +-1, got {self.signs}")
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))

    @classmethod
    def all(cls) -> list["SignTable"]:
        return [cls(s) for s in itertools.product((1, -1), repeat=3)]

    def multiplier(self, xi) -> np.ndarray:
        """The split quaternion u with lambda(xi) q = q u."""
        xi = np.asarray(xi, dtype=float).reshape(3)
        return np.concatenate([[0.0], np.array(self.signs) * xi])

    def __str__(self) -> str:
        return "(" + ",".join("+" if s > 0 else "-" for s in self.signs) + ")"


# Table written by scripts/calibrate.py; see permuting.calibrate_sign_table.
from .constants import SIGN_TABLE as _CALIBRATED  # noqa: E402

CALIBRATED = SignTable(_CALIBRATED)
# The convention I(q) = q conj(i), S(q) = q s, T(q) = q t, kept for comparison.
CONJUGATE_I_ONLY = SignTable((-1, 1, 1))


@dataclass(frozen=True)
class BVector:
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim == 1:
            a = a.reshape(-1, 4)
        if a.ndim != 2 or a.shape[1] != 4:
            raise ValueError(f"BVector needs shape (n, 4), got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def of(cls, *quats) -> "BVector":
        return cls(np.array([np.asarray(q, dtype=float) for q in quats]))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype or float)

    def quaternions(self) -> list[SplitQuaternion]:
        return [SplitQuaternion.from_array(e) for e in self.entries]

    def __add__(self, other):
        return BVector(self.entries + np.asarray(other))

    def __sub__(self, other):
        return BVector(self.entries - np.asarray(other))

    def __mul__(self, c: float):
        return BVector(float(c) * self.entries)

    __rmul__ = __mul__

    def __neg__(self):
        return BVector(-self.entries)


def _as(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return a.reshape(-1, 4) if a.ndim == 1 else a


def metric(alpha, beta) -> float:
    """<alpha, beta> = Re(beta conj(alpha)^T), signature (2n, 2n)."""
    a, b = _as(alpha), _as(beta)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(np.sum(QFORM * a * b))


def gram(n: int) -> np.ndarray:
    """Gram matrix of the metric on the standard real basis of R^{4n}."""
    return np.diag(np.tile(QFORM, n))


def lambda_matrix(xi, n: int, table: SignTable = CALIBRATED) -> np.ndarray:
    """Real 4n x 4n matrix of lambda(xi) on flattened B^n."""
    return np.kron(np.eye(n), right_mul_matrix(table.multiplier(xi)))


def lambda_apply(xi, alpha, table: SignTable = CALIBRATED) -> BVector:
    a = _as(alpha)
    return BVector(mul_arrays(a, table.multiplier(xi)))


def omega(xi, X, Y, table: SignTable = CALIBRATED) -> float:
    """omega_xi(X, Y) = <lambda(xi) X, Y>."""
    return metric(lambda_apply(xi, X, table), Y)


def is_sp_matrix(A, tol: float = SP_TOL) -> bool:
    """A conj(A)^T == Id for an (n, n, 4) array of split quaternions."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 3 or A.shape[0] != A.shape[1] or A.shape[2] != 4:
        return False
    n = A.shape[0]
    # (A conj(A)^T)_{jk} = sum_l A_{jl} conj(A_{kl})
    prod = np.einsum("jla,klb,abc->jkc", A, conj_arrays(A), MUL_TABLE)
    ident = np.zeros((n, n, 4))
    ident[np.arange(n), np.arange(n), 0] = 1.0
    return bool(np.max(np.abs(prod - ident)) <= tol)


def identity_matrix(n: int) -> np.ndarray:
    A = np.zeros((n, n, 4))
    A[np.arange(n), np.arange(n), 0] = 1.0
    return A


def diag_matrix(*quats) -> np.ndarray:
    A = np.zeros((len(quats), len(quats), 4))
    for k, q in enumerate(quats):
        A[k, k] = np.asarray(q, dtype=float)
    return A


def sp_action(A, xi, q, check: bool = True) -> BVector:
    """(A, xi) . q = A q conj(xi)."""
    A = np.asarray(A, dtype=float)
    if check and not is_sp_matrix(A):
        raise NotSymplectic("A conj(A)^T != Id")
    xa = np.asarray(xi, dtype=float).reshape(4)
    if check and abs(float(norm_sq_arrays(xa)) - 1.0) > SP_TOL:
        raise NotSymplectic("xi is not a unit split quaternion")
    Aq = np.einsum("jla,lb,abc->jc", A, _as(q), MUL_TABLE)
    return BVector(mul_arrays(Aq, conj_arrays(xa)))


def split_quaternionic_residual(table: SignTable, n: int = 1) -> float:
    """Max deviation of lambda from the relations I^2 = -1, S^2 = T^2 = 1, IS = T = -SI, TS = I."""
    I, S, T = (lambda_matrix(e, n, table) for e in np.eye(3))
    ident = np.eye(4 * n)
    checks = [I @ I + ident, S @ S - ident, T @ T - ident, I @ S - T, S @ I + T, T @ S - I]
    return float(max(np.max(np.abs(c)) for c in checks))
