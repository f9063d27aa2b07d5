"""Real Lie algebras given by structure constants and an ad-invariant inner product."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """[e_i, e_j] = sum_k c[i, j, k] e_k, with inner product matrix ``ip``."""

    dim: int
    c: np.ndarray
    ip: np.ndarray
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        ip = np.array(self.ip, dtype=float)
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if c.shape != (self.dim,) * 3:
            raise DimensionMismatch(f"structure constants have shape {c.shape}, expected {(self.dim,) * 3}")
        if ip.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"inner product has shape {ip.shape}")
        c.setflags(write=False)
        ip.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "ip", ip)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.c, other.c) and np.array_equal(self.ip, other.ip)

    __hash__ = None

    def basis(self, k: int) -> "LieVector":
        v = np.zeros(self.dim)
        v[k] = 1.0
        return LieVector(v)

    def vector(self, coords) -> "LieVector":
        v = LieVector(coords)
        _check(self, v)
        return v

    # Array-level helpers broadcast over leading axes; the ODE code uses these.
    def bracket_arrays(self, x, y) -> np.ndarray:
        return np.einsum("...i,...j,ijk->...k", x, y, self.c)

    def inner_arrays(self, x, y) -> np.ndarray:
        return np.einsum("...i,ij,...j->...", x, self.ip, y)

    def ad_matrix(self, x) -> np.ndarray:
        """Matrix of ad_x in the standard basis (acting on column vectors)."""
        return np.einsum("i,ijk->kj", np.asarray(x, dtype=float), self.c)

    def to_json(self) -> dict:
        return {"dim": self.dim, "c": self.c.tolist(), "ip": self.ip.tolist()}


@dataclass(frozen=True)
class LieVector:
    coords: np.ndarray

    def __post_init__(self):
        a = np.array(self.coords, dtype=float).reshape(-1)
        a.setflags(write=False)
        object.__setattr__(self, "coords", a)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coords, dtype=dtype or float)

    def __add__(self, other):
        return LieVector(self.coords + np.asarray(other))

    def __sub__(self, other):
        return LieVector(self.coords - np.asarray(other))

    def __mul__(self, c: float):
        return LieVector(float(c) * self.coords)

    __rmul__ = __mul__

    def __neg__(self):
        return LieVector(-self.coords)

    def __len__(self):
        return self.coords.shape[0]


def _check(L: LieAlgebra, *vs) -> None:
    for v in vs:
        if np.asarray(v).shape != (L.dim,):
            raise DimensionMismatch(f"vector of shape {np.asarray(v).shape} does not belong to a dim-{L.dim} algebra")


def su2() -> LieAlgebra:
    """su(2) with [e1, e2] = e3 (cyclic) and the identity inner product."""
    c = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[i, j, k] = 1.0
        c[j, i, k] = -1.0
    return LieAlgebra(3, c, np.eye(3), name="su2")


def abelian(dim: int) -> LieAlgebra:
    return LieAlgebra(dim, np.zeros((dim, dim, dim)), np.eye(dim), name=f"u1^{dim}")


def bracket(L: LieAlgebra, x, y) -> LieVector:
    _check(L, x, y)
    return LieVector(L.bracket_arrays(np.asarray(x), np.asarray(y)))


def inner(L: LieAlgebra, x, y) -> float:
    _check(L, x, y)
    return float(L.inner_arrays(np.asarray(x), np.asarray(y)))


@dataclass
class AlgebraReport:
    antisymmetry: float
    jacobi: float
    ad_invariance: float
    ip_symmetric: float
    ip_positive: bool
    tol: float

    @property
    def passed(self) -> bool:
        return (
            max(self.antisymmetry, self.jacobi, self.ad_invariance, self.ip_symmetric) <= self.tol
            and self.ip_positive
        )

    def as_dict(self) -> dict:
        return {
            "antisymmetry": self.antisymmetry,
            "jacobi": self.jacobi,
            "ad_invariance": self.ad_invariance,
            "ip_symmetric": self.ip_symmetric,
            "ip_positive": self.ip_positive,
            "tol": self.tol,
            "passed": self.passed,
        }


def check_algebra(L: LieAlgebra, tol: float = 1e-12) -> AlgebraReport:
    """Max residuals of antisymmetry, Jacobi and ad-invariance over basis triples."""
    c = L.c
    anti = np.max(np.abs(c + c.transpose(1, 0, 2)), initial=0.0)
    # [e_i, [e_j, e_k]] = sum_m c[j,k,m] c[i,m,n] e_n
    jj = np.einsum("jkm,imn->ijkn", c, c)
    jac = jj + jj.transpose(1, 2, 0, 3) + jj.transpose(2, 0, 1, 3)
    # <[e_i, e_j], e_k> - <e_i, [e_j, e_k]>
    lhs = np.einsum("ijm,mk->ijk", c, L.ip)
    rhs = np.einsum("jkm,im->ijk", c, L.ip)
    ip_sym = np.max(np.abs(L.ip - L.ip.T), initial=0.0)
    try:
        positive = bool(np.all(np.linalg.eigvalsh((L.ip + L.ip.T) / 2) > 0))
    except np.linalg.LinAlgError:
        positive = False
    return AlgebraReport(
        antisymmetry=float(anti),
        jacobi=float(np.max(np.abs(jac), initial=0.0)),
        ad_invariance=float(np.max(np.abs(lhs - rhs), initial=0.0)),
        ip_symmetric=float(ip_sym),
        ip_positive=positive,
        tol=tol,
    )


def load_algebra(source: str | Path) -> LieAlgebra:
    """Built-in name ("su2", "u1^n") or path to a JSON file {"dim", "c", "ip"}."""
    s = str(source)
    if s == "su2":
        return su2()
    if s.startswith("u1^"):
        return abelian(int(s[3:]))
    data = json.loads(Path(s).read_text(encoding="utf-8"))
    try:
        L = LieAlgebra(int(data["dim"]), data["c"], data["ip"], name=Path(s).stem)
    except KeyError as exc:
        raise ValueError(f"structure-constant file {s} is missing key {exc}") from None
    return L


def save_algebra(L: LieAlgebra, path: str | Path) -> None:
    Path(path).write_text(json.dumps(L.to_json(), indent=2) + "\n", encoding="utf-8")


# 2x2 realisation of su(2): e_k = -(i/2) sigma_k, so [e1, e2] = e3 and
# <X, Y> = -2 tr(XY) reproduces the identity inner product.
_PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)
SU2_GENERATORS = -0.5j * _PAULI


def su2_to_matrix(x) -> np.ndarray:
    """Coordinates (..., 3) -> anti-hermitian traceless matrices (..., 2, 2)."""
    return np.einsum("...k,kab->...ab", np.asarray(x, dtype=float), SU2_GENERATORS)


def su2_from_matrix(X) -> np.ndarray:
    return np.real(-2.0 * np.einsum("...ab,kba->...k", X, SU2_GENERATORS))
