"""Nahm-Schmid equations over a compact Lie algebra.

    T1' + [T0, T1] = -[T2, T3]
    T2' + [T0, T2] =  [T3, T1]
    T3' + [T0, T3] =  [T1, T2]

States are arrays of shape (4, dim) holding (T0, T1, T2, T3).  T0 is carried
as a constant during integration (its derivative slot is zero); the reduced
system drops it.  Everything uses fixed-step classical RK4.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import bisect

from .liealg import LieAlgebra, LieVector, su2, su2_from_matrix, su2_to_matrix
from .splitquat import adjoint_matrix

# Metric coefficients a_00 = a_11 = 1, a_22 = a_33 = -1.
A_DIAG = np.array([1.0, 1.0, -1.0, -1.0])
DEGENERACY_REL_TOL = 1e-8


class IntegrationBlowup(FloatingPointError):
    pass


class Unsupported(TypeError):
    pass


@dataclass(frozen=True)
class NahmState:
    T0: LieVector
    T1: LieVector
    T2: LieVector
    T3: LieVector

    @classmethod
    def from_array(cls, a) -> "NahmState":
        a = np.asarray(a, dtype=float)
        return cls(*(LieVector(row) for row in a))

    @classmethod
    def zeros(cls, dim: int) -> "NahmState":
        return cls.from_array(np.zeros((4, dim)))

    def to_array(self) -> np.ndarray:
        return np.array([self.T0.coords, self.T1.coords, self.T2.coords, self.T3.coords])

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.to_array(), dtype=dtype or float)


@dataclass(frozen=True)
class NahmTrajectory:
    algebra: LieAlgebra
    t_grid: np.ndarray
    states: np.ndarray  # (N+1, 4, dim)
    reduced: bool = True
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def steps(self) -> int:
        return self.t_grid.size - 1

    @property
    def step(self) -> float:
        return float(self.t_grid[1] - self.t_grid[0])

    @property
    def length(self) -> float:
        return float(self.t_grid[-1])

    def state(self, k: int) -> NahmState:
        return NahmState.from_array(self.states[k])

    def with_states(self, states, **kw) -> "NahmTrajectory":
        return NahmTrajectory(self.algebra, self.t_grid, np.asarray(states), kw.get("reduced", self.reduced), dict(self.meta))


class _Bracket:
    """Batched bracket [x, y] via one matmul against the flattened structure constants."""

    def __init__(self, L: LieAlgebra):
        self.d = L.dim
        self.C = L.c.reshape(L.dim * L.dim, L.dim)

    def __call__(self, X, Y):
        X = np.asarray(X)
        Y = np.asarray(Y)
        outer = (X[..., :, None] * Y[..., None, :]).reshape(X.shape[:-1] + (self.d * self.d,))
        return outer @ self.C


def _as_state(init, dim: int) -> np.ndarray:
    a = np.asarray(init.to_array() if isinstance(init, NahmState) else init, dtype=float)
    if a.shape != (4, dim):
        raise ValueError(f"state has shape {a.shape}, expected (4, {dim})")
    return a


# Index pairs for the brackets [T2,T3], [T3,T1], [T1,T2], [T0,T1], [T0,T2], [T0,T3].
_LEFT = np.array([2, 3, 1, 0, 0, 0])
_RIGHT = np.array([3, 1, 2, 1, 2, 3])
_SIGN = np.array([-1.0, 1.0, 1.0])[:, None]


def _rhs_array(y: np.ndarray, C: np.ndarray, reduced: bool) -> np.ndarray:
    """Right-hand side for states of shape (..., 4, dim)."""
    m = 3 if reduced else 6
    X = y[..., _LEFT[:m], :]
    Y = y[..., _RIGHT[:m], :]
    b = (X[..., :, None] * Y[..., None, :]).reshape(X.shape[:-1] + (-1,)) @ C
    out = np.zeros_like(y)
    out[..., 1:, :] = _SIGN * b[..., :3, :]
    if not reduced:
        out[..., 1:, :] -= b[..., 3:, :]
    return out


def rhs(L: LieAlgebra, state, reduced: bool = True) -> np.ndarray:
    """Time derivative of (T0, T1, T2, T3); the T0 slot is zero."""
    s = _as_state(state, L.dim)
    return _rhs_array(s, _Bracket(L).C, reduced)


def _rk4_states(L: LieAlgebra, y0: np.ndarray, length: float, steps: int, reduced: bool) -> np.ndarray:
    """RK4 for a batch of initial states (..., 4, dim); returns (..., N+1, 4, dim)."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if not length > 0:
        raise ValueError("length must be positive")
    y = np.array(y0, dtype=float)
    if reduced:
        y[..., 0, :] = 0.0
    h = length / steps
    C = _Bracket(L).C
    f = _rhs_array
    out = np.empty((steps + 1,) + y.shape)
    out[0] = y
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            k1 = f(y, C, reduced)
            k2 = f(y + 0.5 * h * k1, C, reduced)
            k3 = f(y + 0.5 * h * k2, C, reduced)
            k4 = f(y + h * k3, C, reduced)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            out[k + 1] = y
    finite = np.all(np.isfinite(out.reshape(steps + 1, -1)), axis=1)
    if not finite.all():
        raise IntegrationBlowup(f"non-finite state at step {int(np.argmin(finite))}")
    return np.moveaxis(out, 0, -3)


def integrate(L: LieAlgebra, init, length: float = 1.0, steps: int = 1000, reduced: bool = True) -> NahmTrajectory:
    y = _as_state(init, L.dim)
    grid = np.linspace(0.0, length, steps + 1)
    return NahmTrajectory(L, grid, _rk4_states(L, y, length, steps, reduced), reduced)


def integrate_batch(L: LieAlgebra, inits, length: float = 1.0, steps: int = 1000, reduced: bool = True) -> list[NahmTrajectory]:
    """Integrate several initial states in one vectorised RK4 loop."""
    y = np.asarray(inits, dtype=float)
    if y.ndim != 3 or y.shape[1:] != (4, L.dim):
        raise ValueError(f"initial states have shape {y.shape}, expected (B, 4, {L.dim})")
    grid = np.linspace(0.0, length, steps + 1)
    S = _rk4_states(L, y, length, steps, reduced)
    return [NahmTrajectory(L, grid, S[b], reduced) for b in range(S.shape[0])]


def conserved(L: LieAlgebra, state) -> float:
    """2|T1|^2 + |T2|^2 + |T3|^2."""
    s = _as_state(state, L.dim)
    n = L.inner_arrays(s[1:], s[1:])
    return float(2.0 * n[0] + n[1] + n[2])


def conserved_series(traj: NahmTrajectory) -> np.ndarray:
    n = traj.algebra.inner_arrays(traj.states[:, 1:], traj.states[:, 1:])
    return 2.0 * n[:, 0] + n[:, 1] + n[:, 2]


# -- finite differences on the grid -------------------------------------------

# Weights over a common denominator of 12.  Each stencil sums to zero, so it is
# applied to differences against its first node; constants then give exactly 0.
_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0])
# One-sided fourth-order stencils for the first two and last two nodes.
_FORWARD = {
    0: np.array([-25.0, 48.0, -36.0, 16.0, -3.0]),
    1: np.array([-3.0, -10.0, 18.0, -6.0, 1.0]),
}


def time_derivative(values: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    """Fourth-order derivative along ``axis``; central inside, one-sided at the ends."""
    if axis != 0:
        return np.moveaxis(time_derivative(np.moveaxis(values, axis, 0), h), 0, axis)
    v = np.asarray(values)
    if not np.iscomplexobj(v):
        v = v.astype(float)
    n = v.shape[0]
    if n < 5:
        raise ValueError("need at least 5 grid nodes for fourth-order differences")
    d = np.empty_like(v)
    base = v[: n - 4]
    d[2:-2] = sum(w * (v[k : n - 4 + k] - base) for k, w in enumerate(_CENTRAL) if w)
    head, tail = v[:5] - v[0], v[::-1][:5] - v[-1]
    d[0] = np.tensordot(_FORWARD[0], head, axes=1)
    d[1] = np.tensordot(_FORWARD[1], head, axes=1)
    d[-1] = -np.tensordot(_FORWARD[0], tail, axes=1)
    d[-2] = -np.tensordot(_FORWARD[1], tail, axes=1)
    return d / (12.0 * h)


def moment_maps(traj: NahmTrajectory, reduced: bool = False) -> np.ndarray:
    """(mu_I, mu_S, mu_T) along the grid, shape (N+1, 3, dim)."""
    L = traj.algebra
    br = _Bracket(L)
    S = traj.states
    dT = time_derivative(S[:, 1:], traj.step)
    T0, T1, T2, T3 = (S[:, k] for k in range(4))
    mu = np.empty_like(dT)
    mu[:, 0] = dT[:, 0] + br(T2, T3)
    mu[:, 1] = dT[:, 1] - br(T3, T1)
    mu[:, 2] = dT[:, 2] - br(T1, T2)
    if not reduced:
        mu[:, 0] += br(T0, T1)
        mu[:, 1] += br(T0, T2)
        mu[:, 2] += br(T0, T3)
    return mu


def _sup_norm(L: LieAlgebra, v: np.ndarray) -> float:
    return float(np.sqrt(np.max(np.abs(L.inner_arrays(v, v)))))


def moment_residual(traj: NahmTrajectory, reduced: bool = False) -> tuple[float, float, float]:
    """sup_t of |mu_I|, |mu_S|, |mu_T|."""
    mu = moment_maps(traj, reduced)
    return tuple(_sup_norm(traj.algebra, mu[:, k]) for k in range(3))


# -- symmetries ----------------------------------------------------------------

def _require_su2(L: LieAlgebra) -> None:
    ref = su2()
    if L.dim != 3 or not np.allclose(L.c, ref.c) or not np.allclose(L.ip, ref.ip):
        raise Unsupported("gauge action is implemented for the 2x2 realisation of su(2) only")


def gauge_transform(g_path, traj: NahmTrajectory, g_dot=None) -> NahmTrajectory:
    """T0 -> g T0 g^-1 - g' g^-1, Ti -> g Ti g^-1.

    ``g_dot`` defaults to fourth-order differences of ``g_path`` on the grid.
    """
    _require_su2(traj.algebra)
    g = np.asarray(g_path, dtype=complex)
    if g.shape != (traj.t_grid.size, 2, 2):
        raise ValueError(f"g_path must have shape {(traj.t_grid.size, 2, 2)}")
    gd = time_derivative(g, traj.step) if g_dot is None else np.asarray(g_dot, dtype=complex)
    ginv = np.conj(np.swapaxes(g, 1, 2))
    M = su2_to_matrix(traj.states)  # (N+1, 4, 2, 2)
    conjugated = np.einsum("kab,kibc,kcd->kiad", g, M, ginv)
    conjugated[:, 0] -= np.einsum("kab,kbc->kac", gd, ginv)
    return traj.with_states(su2_from_matrix(conjugated), reduced=False)


def solve_gauge(traj: NahmTrajectory) -> tuple[np.ndarray, np.ndarray]:
    """RK4 solution of g' = g T0 with g(0) = Id; returns (g, g') on the grid."""
    _require_su2(traj.algebra)
    T0m = su2_to_matrix(traj.states[:, 0])
    spline = CubicSpline(traj.t_grid, traj.states[:, 0], axis=0)
    h = traj.step
    g = np.empty((traj.t_grid.size, 2, 2), dtype=complex)
    g[0] = np.eye(2)
    for k in range(traj.steps):
        t = traj.t_grid[k]
        A0 = T0m[k]
        Am = su2_to_matrix(spline(t + 0.5 * h))
        A1 = T0m[k + 1]
        y = g[k]
        k1 = y @ A0
        k2 = (y + 0.5 * h * k1) @ Am
        k3 = (y + 0.5 * h * k2) @ Am
        k4 = (y + h * k3) @ A1
        g[k + 1] = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return g, np.einsum("kab,kbc->kac", g, T0m)


def gauge_fix_T0(traj: NahmTrajectory, return_gauge: bool = False):
    """Gauge transform making T0 vanish.  g(0) = Id; g(1) is left as it comes out."""
    g, gd = solve_gauge(traj)
    fixed = gauge_transform(g, traj, gd)
    fixed = fixed.with_states(fixed.states, reduced=True)
    fixed.meta["g_end"] = g[-1]
    return (fixed, g) if return_gauge else fixed


def scaling(a: float, traj: NahmTrajectory, check_tol: float = 1e-6) -> NahmTrajectory:
    """Phi_a: T(t) -> a T(a t) on the same grid over [0, L].

    Needs the solution on [0, aL]; it is produced by RK4 from T(0), which
    restricts for a <= 1 and extends for a > 1.
    """
    if not a > 0:
        raise ValueError("scaling factor must be positive")
    res = max(moment_residual(traj, reduced=traj.reduced))
    if res > check_tol:
        raise ValueError(f"trajectory is not a solution (moment residual {res:.3g})")
    if a == 1.0:
        return traj.with_states(traj.states.copy())
    base = integrate(traj.algebra, traj.states[0], a * traj.length, traj.steps, traj.reduced)
    return traj.with_states(a * base.states)


def su11_act(q, traj: NahmTrajectory) -> NahmTrajectory:
    """(T1, T2, T3) -> Ad(q)(T1, T2, T3) pointwise; T0 fixed."""
    M = adjoint_matrix(q)
    S = traj.states.copy()
    S[:, 1:] = np.einsum("ab,kbd->kad", M, traj.states[:, 1:])
    return traj.with_states(S)


# -- degeneracy locus -------------------------------------------------------------

@dataclass
class DegeneracyReport:
    endpoint_map: np.ndarray
    det: float
    min_singular_value: float
    norm: float
    signed_indicator: float
    degenerate: bool

    def as_row(self) -> dict:
        return {"det": self.det, "min_sv": self.min_singular_value, "indicator": self.signed_indicator}


def _jacobi_generator(L: LieAlgebra, S: np.ndarray, step: float, reduced: bool, covariant: bool = True) -> np.ndarray:
    """M(t) with (xi, xi')' = M(t) (xi, xi') at every node; S has shape (..., N+1, 4, dim).

    The equation is xi'' + k [T0, xi'] + [T0', xi] + sum_i a_ii [Ti, [Ti, xi]] = 0
    with k = 2 when ``covariant`` (the second covariant derivative of xi, which
    makes the map gauge equivariant) and k = 1 otherwise.  Both agree when T0 = 0.
    """
    d = L.dim
    ad = np.einsum("...ti,ijl->...tlj", S, L.c)  # ad matrices of T0..T3 at every node
    if reduced:
        ad_dT0 = np.zeros_like(ad[..., 0, :, :])
    else:
        dT0 = time_derivative(S[..., 0, :], step, axis=-2)
        ad_dT0 = np.einsum("...i,ijl->...lj", dT0, L.c)
    quad = np.einsum("t,...tab,...tbc->...ac", A_DIAG, ad, ad)
    M = np.zeros(S.shape[:-2] + (2 * d, 2 * d))
    M[..., :d, d:] = np.eye(d)
    M[..., d:, :d] = -ad_dT0 - quad
    M[..., d:, d:] = -(2.0 if covariant else 1.0) * ad[..., 0, :, :]
    return M


def _endpoint_maps(L: LieAlgebra, S: np.ndarray, t_grid: np.ndarray, reduced: bool, covariant: bool = True) -> np.ndarray:
    d = L.dim
    h = float(t_grid[1] - t_grid[0])
    M = _jacobi_generator(L, S, h, reduced, covariant)
    Y = np.zeros(S.shape[:-3] + (2 * d, d))
    Y[..., d:, :] = np.eye(d)
    N = t_grid.size - 1
    t_axis = M.ndim - 3
    if N % 2 == 0:
        # RK4 with step 2h; odd nodes serve as the midpoints.
        H = 2.0 * h
        nodes = [(M.take(k, t_axis), M.take(k + 1, t_axis), M.take(k + 2, t_axis)) for k in range(0, N, 2)]
    else:
        H = h
        spline = CubicSpline(t_grid, M, axis=t_axis)
        mids = spline(t_grid[:-1] + 0.5 * h)
        nodes = [(M.take(k, t_axis), mids.take(k, t_axis), M.take(k + 1, t_axis)) for k in range(N)]
    for A0, Am, A1 in nodes:
        k1 = A0 @ Y
        k2 = Am @ (Y + 0.5 * H * k1)
        k3 = Am @ (Y + 0.5 * H * k2)
        k4 = A1 @ (Y + H * k3)
        Y = Y + (H / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return Y[..., :d, :]


def endpoint_map(traj: NahmTrajectory, covariant: bool = True) -> np.ndarray:
    """Shooting map v = xi'(0) -> xi(L) for the Jacobi-type ODE, xi(0) = 0.

    Column k is xi(L) for xi'(0) = e_k.
    """
    return _endpoint_maps(traj.algebra, traj.states, traj.t_grid, traj.reduced, covariant)


def _signed_indicator(F: np.ndarray) -> float:
    """Real eigenvalue of F closest to zero (NaN when F has none).

    Unlike det, this changes sign at a double root such as the constant-T2
    family, where two eigenvalues sin(c)/c cross zero together.
    """
    ev = np.linalg.eigvals(F)
    real = ev[np.abs(ev.imag) <= 1e-9 * max(1.0, np.max(np.abs(ev)))].real
    if real.size == 0:
        return float("nan")
    return float(real[np.argmin(np.abs(real))])


def _report(F: np.ndarray, rel_tol: float) -> DegeneracyReport:
    sv = np.linalg.svd(F, compute_uv=False)
    return DegeneracyReport(
        endpoint_map=F,
        det=float(np.linalg.det(F)),
        min_singular_value=float(sv.min()),
        norm=float(sv.max()),
        signed_indicator=_signed_indicator(F),
        degenerate=bool(sv.min() <= rel_tol * sv.max()),
    )


def degeneracy_indicator(traj: NahmTrajectory, rel_tol: float = DEGENERACY_REL_TOL, covariant: bool = True) -> DegeneracyReport:
    return _report(endpoint_map(traj, covariant), rel_tol)


# -- families and scans ---------------------------------------------------------

@dataclass(frozen=True)
class Family:
    """One-parameter family of reduced solutions, given by initial data c -> T(0).

    With ``scale`` set, each member is replaced by Phi_scale of itself.
    """

    name: str
    initial: Callable[[float], np.ndarray]
    algebra: LieAlgebra
    steps: int = 1000
    scale: float | None = None

    def __call__(self, c: float) -> NahmTrajectory:
        traj = integrate(self.algebra, self.initial(c), 1.0, self.steps, reduced=True)
        return traj if self.scale is None else scaling(self.scale, traj)

    def batch_states(self, params) -> np.ndarray:
        """States of all members, shape (B, N+1, 4, dim), in one vectorised run.

        Phi_a(T)(t) = a T(a t) is T integrated over [0, a] and multiplied by a,
        which is what ``scaling`` does member by member.
        """
        inits = np.array([self.initial(c) for c in params], dtype=float)
        a = 1.0 if self.scale is None else float(self.scale)
        if not a > 0:
            raise ValueError("scaling factor must be positive")
        return a * _rk4_states(self.algebra, inits, a, self.steps, True)

    def with_scale(self, a: float) -> "Family":
        return Family(f"{self.name}@{a:g}", self.initial, self.algebra, self.steps, a)


def constant_family(axis: int, steps: int = 1000, L: LieAlgebra | None = None) -> Family:
    """c -> constant solution T_axis = c e_axis (all brackets vanish)."""
    L = L or su2()

    def initial(c: float) -> np.ndarray:
        init = np.zeros((4, L.dim))
        init[axis, (axis - 1) % L.dim] = c
        return init

    return Family(f"const-t{axis}", initial, L, steps)


def scaled_family(family: Family, a: float) -> Family:
    return family.with_scale(a)


FAMILIES = {
    "const-t1": lambda steps: constant_family(1, steps=steps),
    "const-t2": lambda steps: constant_family(2, steps=steps),
    "const-t3": lambda steps: constant_family(3, steps=steps),
}


def get_family(name: str, steps: int = 1000, scale: float | None = None) -> Family:
    try:
        fam = FAMILIES[name](steps)
    except KeyError:
        raise ValueError(f"unknown family {name!r}; known: {sorted(FAMILIES)}") from None
    return fam if scale is None else fam.with_scale(scale)


def _workers() -> int:
    raw = os.environ.get("SPLITGEOM_THREADS", "")
    try:
        cap = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        cap = 1
    return max(1, cap)


def _chunks(items: Sequence, k: int) -> list:
    n = len(items)
    bounds = [round(j * n / k) for j in range(k + 1)]
    return [items[bounds[j] : bounds[j + 1]] for j in range(k) if bounds[j + 1] > bounds[j]]


def parallel_map(fn, items: Sequence) -> list:
    """Ordered map; thread count capped by SPLITGEOM_THREADS."""
    w = min(_workers(), len(items) or 1)
    if w == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, items))


@dataclass
class ScanResult:
    rows: list[dict]
    roots: list[float]


def scan_reports(family: Family, params, rel_tol: float = DEGENERACY_REL_TOL) -> list[DegeneracyReport]:
    """Degeneracy reports over a parameter grid, vectorised within chunks."""
    params = [float(c) for c in params]
    if not params:
        return []
    grid = np.linspace(0.0, 1.0, family.steps + 1)

    def run(chunk):
        F = _endpoint_maps(family.algebra, family.batch_states(chunk), grid, True)
        return [_report(f, rel_tol) for f in F]

    chunks = _chunks(params, min(_workers(), len(params)))
    return [r for part in parallel_map(run, chunks) for r in part]


def degeneracy_scan(family: Family, params, xtol: float = 1e-10, root_sv_tol: float = 1e-6) -> ScanResult:
    """Tabulate (param, det, min_sv) and refine sign changes of the signed indicator
    by bisection.  A bracket is kept only if the map is numerically singular at
    the refined root (relative min singular value <= root_sv_tol)."""
    params = [float(c) for c in params]
    reports = scan_reports(family, params)
    rows = [{"param": c, **r.as_row()} for c, r in zip(params, reports)]

    def indicator(c):
        return _finite(scan_reports(family, [c])[0].signed_indicator)

    roots = []
    for k in range(len(params) - 1):
        f0 = reports[k].signed_indicator
        f1 = reports[k + 1].signed_indicator
        if not (np.isfinite(f0) and np.isfinite(f1)):
            continue
        if f0 == 0.0:
            root = params[k]
        elif f0 * f1 < 0:
            root = bisect(indicator, params[k], params[k + 1], xtol=xtol)
        else:
            continue
        rep = scan_reports(family, [root])[0]
        if rep.min_singular_value <= root_sv_tol * max(rep.norm, 1e-300):
            if not roots or abs(root - roots[-1]) > 10 * xtol:
                roots.append(float(root))
    return ScanResult(rows, roots)


def _finite(v: float) -> float:
    return 0.0 if not np.isfinite(v) else v


# -- closed forms used by tests and the CLI ---------------------------------------

def exact_solution(k: float, t) -> np.ndarray:
    """T1 = -k tanh(kt) e1, T2 = k sech(kt) e2, T3 = k sech(kt) e3 on su(2); shape (len(t), 4, 3)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros((t.size, 4, 3))
    out[:, 1, 0] = -k * np.tanh(k * t)
    out[:, 2, 1] = k / np.cosh(k * t)
    out[:, 3, 2] = k / np.cosh(k * t)
    return out


def exact_trajectory(k: float, steps: int = 1000, length: float = 1.0) -> NahmTrajectory:
    grid = np.linspace(0.0, length, steps + 1)
    return NahmTrajectory(su2(), grid, exact_solution(k, grid), True)
