"""Split quaternions B = span(1, i, s, t).

Relations: i^2 = -1, s^2 = t^2 = 1, i s = t = -s i, t s = i.
The quadratic form is w^2 + x^2 - y^2 - z^2 and it is multiplicative.

Coordinates are stored in the order (w, x, y, z) for (1, i, s, t).  The
array-level functions (``mul_arrays`` etc.) broadcast over leading axes and
are what the other modules use internally; ``SplitQuaternion`` is the
value-type face of the same table.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

NULL_TOL = 1e-12
UNIT_TOL = 1e-10

# Signature of the quadratic form in the (1, i, s, t) basis.
QFORM = np.array([1.0, 1.0, -1.0, -1.0])
# Signature restricted to Im(B) = span(i, s, t); also the metric on sp(1,B).
IM_QFORM = np.array([1.0, -1.0, -1.0])


def _build_table() -> np.ndarray:
    """MUL[a, b, c]: coefficient of basis c in e_a * e_b."""
    table = np.zeros((4, 4, 4))
    one, i, s, t = range(4)
    entries = {
        (one, one): (one, 1), (one, i): (i, 1), (one, s): (s, 1), (one, t): (t, 1),
        (i, one): (i, 1), (i, i): (one, -1), (i, s): (t, 1), (i, t): (s, -1),
        (s, one): (s, 1), (s, i): (t, -1), (s, s): (one, 1), (s, t): (i, -1),
        (t, one): (t, 1), (t, i): (s, 1), (t, s): (i, 1), (t, t): (one, 1),
    }
    for (a, b), (c, sign) in entries.items():
        table[a, b, c] = sign
    return table


MUL_TABLE = _build_table()
MUL_TABLE.setflags(write=False)


class NullDivisor(ZeroDivisionError):
    """Raised when inverting a split quaternion of zero norm."""


class NotUnit(ValueError):
    """Raised when an operation requires norm_sq == 1."""


# -- array level -------------------------------------------------------------

def mul_arrays(p, q, table: np.ndarray = MUL_TABLE) -> np.ndarray:
    """Product of coordinate arrays of shape (..., 4)."""
    return np.einsum("...a,...b,abc->...c", p, q, table)


def conj_arrays(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return p * np.array([1.0, -1.0, -1.0, -1.0])


def norm_sq_arrays(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.sum(QFORM * p * p, axis=-1)


def right_mul_matrix(r, table: np.ndarray = MUL_TABLE) -> np.ndarray:
    """4x4 matrix R with R @ p == p * r."""
    return np.einsum("abc,b->ca", table, np.asarray(r, dtype=float))


def left_mul_matrix(r, table: np.ndarray = MUL_TABLE) -> np.ndarray:
    """4x4 matrix L with L @ p == r * p."""
    return np.einsum("abc,a->cb", table, np.asarray(r, dtype=float))


# -- value types -------------------------------------------------------------

@dataclass(frozen=True)
class SplitQuaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "SplitQuaternion":
        w, x, y, z = (float(v) for v in np.asarray(a, dtype=float).reshape(4))
        return cls(w, x, y, z)

    def __array__(self, dtype=None, copy=None):
        return np.array([self.w, self.x, self.y, self.z], dtype=dtype or float)

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __add__(self, other):
        return SplitQuaternion.from_array(self.to_array() + _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SplitQuaternion.from_array(self.to_array() - _coerce(other))

    def __rsub__(self, other):
        return SplitQuaternion.from_array(_coerce(other) - self.to_array())

    def __neg__(self):
        return SplitQuaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return SplitQuaternion.from_array(float(other) * self.to_array())
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return SplitQuaternion.from_array(float(other) * self.to_array())
        return mul(other, self)

    def __truediv__(self, c: float):
        return SplitQuaternion.from_array(self.to_array() / float(c))

    def imag(self) -> "ImSplit":
        return ImSplit(self.x, self.y, self.z)

    def __repr__(self) -> str:
        return f"{self.w!r} + {self.x!r}i + {self.y!r}s + {self.z!r}t"


@dataclass(frozen=True)
class ImSplit:
    """Imaginary split quaternion x i + y s + z t, i.e. an element of sp(1,B)."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.y, self.z], dtype=dtype or float)

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def as_quaternion(self) -> SplitQuaternion:
        return SplitQuaternion(0.0, self.x, self.y, self.z)

    def __add__(self, other: "ImSplit") -> "ImSplit":
        return ImSplit(self.x + other.x, self.y + other.y, self.z + other.z)

    def __mul__(self, c: float) -> "ImSplit":
        return ImSplit(c * self.x, c * self.y, c * self.z)

    __rmul__ = __mul__

    def __neg__(self):
        return ImSplit(-self.x, -self.y, -self.z)


def _coerce(v) -> np.ndarray:
    if isinstance(v, (int, float, np.floating)):
        return np.array([float(v), 0.0, 0.0, 0.0])
    if isinstance(v, ImSplit):
        return np.array([0.0, v.x, v.y, v.z])
    return np.asarray(v, dtype=float).reshape(4)


ONE = SplitQuaternion(1.0, 0.0, 0.0, 0.0)
I = SplitQuaternion(0.0, 1.0, 0.0, 0.0)
S = SplitQuaternion(0.0, 0.0, 1.0, 0.0)
T = SplitQuaternion(0.0, 0.0, 0.0, 1.0)

# Basis (xi_1, xi_2, xi_3) = (i, s, t) of sp(1,B).
XI = (ImSplit(1.0, 0.0, 0.0), ImSplit(0.0, 1.0, 0.0), ImSplit(0.0, 0.0, 1.0))


def mul(p, q) -> SplitQuaternion:
    return SplitQuaternion.from_array(mul_arrays(_coerce(p), _coerce(q)))


def conj(p) -> SplitQuaternion:
    return SplitQuaternion.from_array(conj_arrays(_coerce(p)))


def norm_sq(p) -> float:
    if isinstance(p, ImSplit):
        return p.x * p.x - p.y * p.y - p.z * p.z
    return float(norm_sq_arrays(_coerce(p)))


def inner(p, q) -> float:
    """<p, q> = Re(p conj(q))."""
    return float(mul_arrays(_coerce(p), conj_arrays(_coerce(q)))[0])


def inverse(p) -> SplitQuaternion:
    n = norm_sq(p)
    if abs(n) <= NULL_TOL:
        raise NullDivisor(f"split quaternion {p!r} has norm_sq {n!r}; it is a zero divisor")
    return SplitQuaternion.from_array(conj_arrays(_coerce(p)) / n)


class Causal(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    NULL = "null"


def classify(xi: ImSplit, tol: float = NULL_TOL) -> Causal:
    n = norm_sq(xi)
    if n > tol:
        return Causal.SPACELIKE
    if n < -tol:
        return Causal.TIMELIKE
    return Causal.NULL


def adjoint_matrix(q, table: np.ndarray = MUL_TABLE) -> np.ndarray:
    """Matrix of xi -> q xi conj(q) on Im(B) in the (i, s, t) basis.

    Lands in SO+(1,2): M^T J M = J with J = diag(1, -1, -1), det M = 1.
    """
    qa = _coerce(q)
    n = float(norm_sq_arrays(qa))
    if abs(n - 1.0) > UNIT_TOL:
        raise NotUnit(f"norm_sq(q) = {n!r}, expected 1")
    basis = np.eye(4)[1:]
    images = mul_arrays(mul_arrays(qa, basis, table), conj_arrays(qa), table)
    return images[:, 1:].T.copy()


def random_unit(seed, scale: float = 1.0) -> SplitQuaternion:
    """Deterministic random element of SU(1,1) on the sheet containing 1.

    The imaginary part is drawn from N(0, scale^2); the real part is the
    positive root of w^2 = 1 - x^2 + y^2 + z^2, redrawing when it is negative.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    while True:
        x, y, z = rng.normal(scale=scale, size=3)
        w2 = 1.0 - x * x + y * y + z * z
        if w2 > 0.0:
            return SplitQuaternion(float(np.sqrt(w2)), float(x), float(y), float(z))


def random_units(rng: np.random.Generator, count: int, scale: float = 1.0) -> np.ndarray:
    """Array (count, 4) of unit split quaternions; vectorised ``random_unit``."""
    out = np.empty((0, 4))
    while out.shape[0] < count:
        im = rng.normal(scale=scale, size=(2 * (count - out.shape[0]) + 4, 3))
        w2 = 1.0 - im[:, 0] ** 2 + im[:, 1] ** 2 + im[:, 2] ** 2
        ok = w2 > 0.0
        block = np.column_stack([np.sqrt(w2[ok]), im[ok]])
        out = np.vstack([out, block])
    return out[:count]
