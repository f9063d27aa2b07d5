"""Split 3-Sasakian structure on the positive pseudo-sphere S_+ in B^{n+1}.

Points and tangent vectors are flat real arrays of length 4(n+1).  The
Reeb fields are the linear fields X_1 = I E, X_2 = -S E, X_3 = -T E with
E(p) = p, so brackets among them are exact matrix commutators.  Other
brackets and exterior derivatives are central differences on ambient
extensions of the fields, which is legitimate because the extensions are
tangent to S_+ along S_+.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import combinations, permutations

import numpy as np
from scipy.linalg import null_space

from . import constants
from .bmodule import CALIBRATED, SignTable, gram, lambda_matrix
from .splitquat import conj_arrays, mul_arrays

FD_STEP = 1e-4
SPHERE_TOL = 1e-10

# Norms of (X_1, X_2, X_3).
TAU = np.array([1.0, -1.0, -1.0])
# Reeb fields as (sign, structure index): X_a = sign * lambda(xi_a) E.
REEB_SIGNS = np.array([1.0, -1.0, -1.0])
# Reference bracket table for the structure fields: (1/2)[X_a, X_b] = sum_c BRACKET_TABLE[a, b, c] X_c.
BRACKET_TABLE = np.zeros((3, 3, 3))
for (a, b, c), v in {(0, 1, 2): 1.0, (1, 2, 0): -1.0, (2, 0, 1): 1.0}.items():
    BRACKET_TABLE[a, b, c] = v
    BRACKET_TABLE[b, a, c] = -v


class DegenerateBasis(RuntimeError):
    pass


@dataclass(frozen=True)
class Conventions:
    """Constants the data is checked against; produced by calibration."""

    epsilon: tuple = tuple(constants.SASAKI_EPSILON)
    d_eta: tuple = tuple(constants.D_ETA_COEFF)
    normality: tuple = tuple(constants.NORMALITY_COEFF)
    bracket_sign: float = constants.BRACKET_SIGN


DEFAULT_CONVENTIONS = Conventions()


class Sphere:
    """Geometry of S_+ inside B^{n+1} for a fixed sign table."""

    def __init__(self, n: int, table: SignTable = CALIBRATED):
        if n < 0:
            raise ValueError("n must be >= 0")
        self.n = n
        self.dim = 4 * (n + 1)
        self.table = table
        self.G = gram(n + 1)
        self.lam = np.array([lambda_matrix(e, n + 1, table) for e in np.eye(3)])
        self.reeb_mats = REEB_SIGNS[:, None, None] * self.lam

    # -- basic pieces --------------------------------------------------------
    def g(self, X, Y) -> float:
        return float(X @ self.G @ Y)

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float).reshape(self.dim)
        if abs(self.g(p, p) - 1.0) > SPHERE_TOL:
            raise ValueError(f"point is off S_+: |p|^2 = {self.g(p, p)!r}")
        return p

    def tangent_project(self, p, X) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return X - (self.g(p, X) / self.g(p, p)) * p

    def reeb(self, a: int, p) -> np.ndarray:
        return self.reeb_mats[a] @ p

    def eta(self, a: int, p, Y) -> float:
        return TAU[a] * self.g(self.reeb(a, p), Y)

    def eta_covector(self, a: int, p) -> np.ndarray:
        return TAU[a] * (self.G @ self.reeb(a, p))

    def phi(self, a: int, p, Y) -> np.ndarray:
        """Phi_a(Y) = lambda(xi_a) Y + eta_a(Y) E."""
        return self.lam[a] @ Y + self.eta(a, p, Y) * p

    def phi_matrix(self, a: int, p) -> np.ndarray:
        return self.lam[a] + np.outer(p, self.eta_covector(a, p))

    # -- sampling ------------------------------------------------------------
    def random_points(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Gaussian ambient samples, non-spacelike rejected, rescaled to |p|^2 = 1."""
        out = []
        while len(out) < count:
            v = rng.normal(size=self.dim)
            nrm = self.g(v, v)
            if nrm > 0.05 * self.dim:
                out.append(v / np.sqrt(nrm))
        return np.array(out)

    def random_tangent(self, rng: np.random.Generator, p, count: int) -> np.ndarray:
        return np.array([self.tangent_project(p, v) for v in rng.normal(size=(count, self.dim))])

    # -- derivatives -----------------------------------------------------------
    def d_one_form(self, covector_field, X, Y, p, step: float = FD_STEP) -> float:
        """d(alpha)(X, Y) at p for constant ambient X, Y (the pullback of d)."""
        dX = (covector_field(p + step * X) - covector_field(p - step * X)) / (2 * step)
        dY = (covector_field(p + step * Y) - covector_field(p - step * Y)) / (2 * step)
        return float(dX @ Y - dY @ X)

    @staticmethod
    def field_bracket(A, B, p, step: float = FD_STEP) -> np.ndarray:
        """[A, B](p) = DB(p) A(p) - DA(p) B(p) by central differences."""
        a, b = A(p), B(p)
        DB_a = (B(p + step * a) - B(p - step * a)) / (2 * step)
        DA_b = (A(p + step * b) - A(p - step * b)) / (2 * step)
        return DB_a - DA_b

    def projected_field(self, X0):
        return lambda q: self.tangent_project(q, X0)

    def nijenhuis(self, a: int, X0, Y0, p) -> np.ndarray:
        """N_Phi(X, Y) at p for the fields X = proj(X0), Y = proj(Y0)."""
        X = self.projected_field(X0)
        Y = self.projected_field(Y0)

        def PX(q):
            return self.phi(a, q, X(q))

        def PY(q):
            return self.phi(a, q, Y(q))

        br = self.field_bracket
        t1 = br(PX, PY, p)
        t2 = self.phi(a, p, self.phi(a, p, br(X, Y, p)))
        t3 = self.phi(a, p, br(X, PY, p))
        t4 = self.phi(a, p, br(PX, Y, p))
        return t1 + t2 - t3 - t4

    def reeb_bracket_residual(self, p, sign: float) -> float:
        """max |(1/2)[X_a, X_b] - sign * table| using exact commutators."""
        worst = 0.0
        R = self.reeb_mats
        for a in range(3):
            for b in range(3):
                exact = 0.5 * (R[b] @ R[a] - R[a] @ R[b]) @ p
                expected = sign * np.einsum("c,cd->d", BRACKET_TABLE[a, b], np.array([self.reeb(c, p) for c in range(3)]))
                worst = max(worst, float(np.max(np.abs(exact - expected))))
        return worst

    # -- horizontal distribution ------------------------------------------------
    def horizontal_basis(self, p) -> np.ndarray:
        """Rows span H = {Y : g(p, Y) = 0, eta_a(Y) = 0}; dimension 4n."""
        p = np.asarray(p, dtype=float)
        constraints = np.array([self.G @ p] + [self.G @ self.reeb(a, p) for a in range(3)])
        basis = null_space(constraints).T
        if basis.shape[0] != 4 * self.n:
            raise DegenerateBasis(f"horizontal space has dimension {basis.shape[0]}, expected {4 * self.n}")
        if self.n > 0:
            restricted = basis @ self.G @ basis.T
            sv = np.linalg.svd(restricted, compute_uv=False)
            if sv.min() <= 1e-8 * sv.max():
                raise DegenerateBasis("metric restricted to H is degenerate")
        return basis

    def vertical_normal_frame(self, p) -> np.ndarray:
        return np.array([p] + [self.reeb(a, p) for a in range(3)])

    def vn_component(self, p, Y) -> np.ndarray:
        """Component of Y in N + V (g-orthogonal projection)."""
        F = self.vertical_normal_frame(p)
        M = F @ self.G @ F.T
        coeffs = np.linalg.solve(M, F @ self.G @ Y)
        return coeffs @ F

    # -- forms -------------------------------------------------------------------
    def beta(self, a: int, p, X, Y) -> float:
        return self.g(self.phi(a, p, X), Y)

    def theta(self, a: int, p, X, Y) -> float:
        """theta_a = beta_a + sum_{j,k} eps_{ajk} eta_j ^ eta_k."""
        val = self.beta(a, p, X, Y)
        for j, k in permutations(range(3), 2):
            if len({a, j, k}) < 3:
                continue
            sgn = _perm_sign((a, j, k))
            val += sgn * (self.eta(j, p, X) * self.eta(k, p, Y) - self.eta(j, p, Y) * self.eta(k, p, X))
        return val

    def omega_hat(self, p, W, X, Y, Z) -> float:
        """theta_1^theta_1 - theta_2^theta_2 - theta_3^theta_3 on (W, X, Y, Z)."""
        vs = (W, X, Y, Z)
        signs = (1.0, -1.0, -1.0)
        return sum(s * wedge22(lambda u, v, a=a: self.theta(a, p, u, v), lambda u, v, a=a: self.theta(a, p, u, v), vs)
                   for a, s in enumerate(signs))

    def omega_restricted(self, p, W, X, Y, Z) -> float:
        """(w1^w1 - w2^w2 - w3^w3)(W, X, Y, Z) with w_a(u, v) = g(lambda_a u, v)."""
        vs = (W, X, Y, Z)
        total = 0.0
        for a, s in enumerate((1.0, -1.0, -1.0)):
            def w(u, v, a=a):
                return self.g(self.lam[a] @ u, v)
            total += s * wedge22(w, w, vs)
        return total


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def wedge22(alpha, beta, vs) -> float:
    """(alpha ^ beta)(v1..v4) = sum over (2,2)-shuffles sgn * alpha(..) beta(..)."""
    total = 0.0
    idx = range(4)
    for pair in combinations(idx, 2):
        rest = tuple(k for k in idx if k not in pair)
        sgn = _perm_sign(pair + rest)
        total += sgn * alpha(vs[pair[0]], vs[pair[1]]) * beta(vs[rest[0]], vs[rest[1]])
    return total


@dataclass
class ContactReport:
    phi_square: float = 0.0
    eta_of_reeb: float = 0.0
    eta_of_phi: float = 0.0
    metric_compat: float = 0.0
    d_eta: float = 0.0
    normality: float = 0.0
    bracket: float = 0.0
    lengths: float = 0.0

    def merge(self, other: "ContactReport") -> "ContactReport":
        return ContactReport(**{k: max(v, getattr(other, k)) for k, v in asdict(self).items()})

    def as_dict(self) -> dict:
        return asdict(self)


def contact_axioms(
    sphere: Sphere,
    p,
    n_samples: int = 4,
    seed: int = 0,
    conv: Conventions = DEFAULT_CONVENTIONS,
    with_derivatives: bool = True,
) -> ContactReport:
    """Residuals of the split 3-contact metric axioms and normality at p."""
    p = sphere.check_point(p)
    rng = np.random.default_rng(seed)
    Ys = sphere.random_tangent(rng, p, n_samples + 1)
    eps = np.asarray(conv.epsilon, dtype=float)
    rep = ContactReport()
    X = [sphere.reeb(a, p) for a in range(3)]

    rep.lengths = max(abs(sphere.g(X[a], X[a]) - TAU[a]) for a in range(3))
    rep.eta_of_reeb = max(abs(sphere.eta(a, p, X[b]) - (a == b)) for a in range(3) for b in range(3))
    rep.bracket = sphere.reeb_bracket_residual(p, conv.bracket_sign)
    for a in range(3):
        rep.eta_of_phi = max(rep.eta_of_phi, float(np.max(np.abs(sphere.phi(a, p, X[a])))))
        for k in range(n_samples):
            U, V = Ys[k], Ys[k + 1]
            PU = sphere.phi(a, p, U)
            rep.eta_of_phi = max(rep.eta_of_phi, abs(sphere.eta(a, p, PU)))
            sq = sphere.phi(a, p, PU) - eps[a] * (U - sphere.eta(a, p, U) * X[a])
            rep.phi_square = max(rep.phi_square, float(np.max(np.abs(sq))))
            lhs = sphere.g(PU, sphere.phi(a, p, V))
            rhs = eps[a] * (-sphere.g(U, V) + TAU[a] * sphere.eta(a, p, U) * sphere.eta(a, p, V))
            rep.metric_compat = max(rep.metric_compat, abs(lhs - rhs))
            if not with_derivatives:
                continue
            deta = sphere.d_one_form(lambda q, a=a: sphere.eta_covector(a, q), U, V, p)
            rep.d_eta = max(rep.d_eta, abs(deta - conv.d_eta[a] * sphere.beta(a, p, U, V)))
            N = sphere.nijenhuis(a, U, V, p)
            rep.normality = max(rep.normality, float(np.max(np.abs(N - conv.normality[a] * deta * X[a]))))
    return rep


def contact_suite(n: int, points: int, seed: int, n_samples: int = 3, conv: Conventions = DEFAULT_CONVENTIONS) -> ContactReport:
    sphere = Sphere(n)
    rng = np.random.default_rng(seed)
    rep = ContactReport()
    for k, p in enumerate(sphere.random_points(rng, points)):
        rep = rep.merge(contact_axioms(sphere, p, n_samples, seed=seed * 100003 + k, conv=conv))
    return rep


def horizontal_invariance(sphere: Sphere, p) -> float:
    """max over horizontal basis vectors Y and a of |(N+V)-part of lambda_a Y|."""
    H = sphere.horizontal_basis(p)
    return max(
        float(np.max(np.abs(sphere.vn_component(p, sphere.lam[a] @ Y)))) for a in range(3) for Y in H
    )


def _random_horizontal(sphere: Sphere, rng, p, count: int) -> np.ndarray:
    H = sphere.horizontal_basis(p)
    return rng.normal(size=(count, H.shape[0])) @ H


def omega_hat_agreement(sphere: Sphere, p, n_samples: int = 4, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        vs = _random_horizontal(sphere, rng, p, 4)
        worst = max(worst, abs(sphere.omega_hat(p, *vs) - sphere.omega_restricted(p, *vs)))
    return worst


def su11_invariance_check(sphere: Sphere, p, q, n_samples: int = 4, seed: int = 0) -> float:
    """max |Omega_hat_p(W..Z) - Omega_hat_{p.q}(W.q, .., Z.q)| over horizontal tuples,
    where v.q = v conj(q) entrywise."""
    p = sphere.check_point(p)
    qa = np.asarray(q, dtype=float).reshape(4)
    n1 = sphere.n + 1

    def move(v):
        return mul_arrays(v.reshape(n1, 4), conj_arrays(qa)).reshape(-1)

    pq = move(p)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        vs = _random_horizontal(sphere, rng, p, 4)
        a = sphere.omega_hat(p, *vs)
        b = sphere.omega_hat(pq, *[move(v) for v in vs])
        worst = max(worst, abs(a - b))
    return worst


def homothety_ratio_residual(sphere: Sphere, p, c1: float, c2: float) -> float:
    """Gram matrices on rho0^{-1}(c1) and rho0^{-1}(c2) at radial points p_c = sqrt(2c) p,
    tangent frames pushed forward by the dilation; returns |G1 - (c1/c2) G2|_max."""
    p = sphere.check_point(p)
    basis = null_space((sphere.G @ p)[None, :]).T
    G1 = (np.sqrt(2 * c1) * basis) @ sphere.G @ (np.sqrt(2 * c1) * basis).T
    G2 = (np.sqrt(2 * c2) * basis) @ sphere.G @ (np.sqrt(2 * c2) * basis).T
    return float(np.max(np.abs(G1 - (c1 / c2) * G2)))


def calibrate_conventions(n: int = 1, seed: int = 0, tol: float = 1e-6) -> Conventions:
    """Fit the epsilon signs, d eta and normality coefficients and the bracket sign at
    one random point and snap each to the nearest of +-1/2, +-1, +-2."""
    sphere = Sphere(n)
    rng = np.random.default_rng(seed)
    p = sphere.random_points(rng, 1)[0]
    U, V = sphere.random_tangent(rng, p, 2)
    X = [sphere.reeb(a, p) for a in range(3)]
    candidates = np.array([-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])

    def snap(num, den) -> float:
        ratio = float(np.dot(num, den) / np.dot(den, den))
        best = candidates[np.argmin(np.abs(candidates - ratio))]
        if abs(best - ratio) > tol * max(1.0, abs(ratio)):
            raise RuntimeError(f"fitted coefficient {ratio!r} is not a simple constant")
        return float(best)

    eps, deta_c, norm_c = [], [], []
    for a in range(3):
        sq = sphere.phi(a, p, sphere.phi(a, p, U))
        eps.append(snap(sq, U - sphere.eta(a, p, U) * X[a]))
        deta = sphere.d_one_form(lambda q, a=a: sphere.eta_covector(a, q), U, V, p)
        deta_c.append(snap(np.array([deta]), np.array([sphere.beta(a, p, U, V)])))
        N = sphere.nijenhuis(a, U, V, p)
        norm_c.append(snap(N, deta * X[a]))
    R = sphere.reeb_mats
    exact = 0.5 * (R[1] @ R[0] - R[0] @ R[1]) @ p
    sign = snap(exact, X[2])
    return Conventions(tuple(eps), tuple(deta_c), tuple(norm_c), sign)
