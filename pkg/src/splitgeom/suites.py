"""Named residual checks shared by the CLI and the acceptance tests."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import bmodule, liealg, nahm, permuting, sasakian
from .splitquat import MUL_TABLE, NotUnit, adjoint_matrix, conj_arrays, mul_arrays, norm_sq_arrays, random_units

J3 = np.diag([1.0, -1.0, -1.0])

# Products of basis elements written out from the defining relations, used as
# an independent reference for whatever table is being checked.
_EXPECTED_PRODUCTS = {
    "1*1": (1, 0, 0, 0), "i*i": (-1, 0, 0, 0), "s*s": (1, 0, 0, 0), "t*t": (1, 0, 0, 0),
    "i*s": (0, 0, 0, 1), "s*i": (0, 0, 0, -1), "t*s": (0, 1, 0, 0), "s*t": (0, -1, 0, 0),
    "i*t": (0, 0, -1, 0), "t*i": (0, 0, 1, 0), "1*i": (0, 1, 0, 0), "s*1": (0, 0, 1, 0),
}
_INDEX = {"1": 0, "i": 1, "s": 2, "t": 3}


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tol)

    def as_dict(self) -> dict:
        return {**asdict(self), "residual": float(self.residual), "passed": self.passed}


def all_passed(checks) -> bool:
    return all(c.passed for c in checks)


def faulty_table(entry: tuple[int, int] = (1, 2)) -> np.ndarray:
    """Multiplication table with the sign of one product flipped (negative control)."""
    t = MUL_TABLE.copy()
    t[entry] *= -1.0
    return t


def algebra_suite(table: np.ndarray = MUL_TABLE, n_pairs: int = 10_000, n_units: int = 1_000, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    basis = np.eye(4)
    table_err = max(
        float(np.max(np.abs(mul_arrays(basis[_INDEX[k[0]]], basis[_INDEX[k[2]]], table) - np.array(v)))) for k, v in _EXPECTED_PRODUCTS.items()
    )
    p = rng.normal(size=(n_pairs, 4))
    q = rng.normal(size=(n_pairs, 4))
    r = rng.normal(size=(n_pairs, 4))
    pq = mul_arrays(p, q, table)
    norm_err = np.max(np.abs(norm_sq_arrays(pq) - norm_sq_arrays(p) * norm_sq_arrays(q)))
    assoc_err = np.max(np.abs(mul_arrays(pq, r, table) - mul_arrays(p, mul_arrays(q, r, table), table)))
    conj_err = np.max(np.abs(conj_arrays(pq) - mul_arrays(conj_arrays(q), conj_arrays(p), table)))

    units_a = random_units(rng, n_units)
    units_b = random_units(rng, n_units)
    hom = metric = so_plus = 0.0
    for a, b in zip(units_a, units_b):
        Ma, Mb = adjoint_matrix(a, table), adjoint_matrix(b, table)
        try:
            Mab = adjoint_matrix(mul_arrays(a, b, table), table)
        except NotUnit:
            # A broken table need not keep units closed under products.
            hom = float("inf")
        else:
            hom = max(hom, float(np.max(np.abs(Mab - Ma @ Mb))))
        metric = max(metric, float(np.max(np.abs(Ma.T @ J3 @ Ma - J3))))
        so_plus = max(so_plus, abs(float(np.linalg.det(Ma)) - 1.0), max(0.0, 1.0 - float(Ma[0, 0])))
    lie = liealg.check_algebra(liealg.su2())
    return [
        Check("mul_table", table_err, 0.0),
        Check("norm_multiplicative", float(norm_err), 1e-10),
        Check("associative", float(assoc_err), 1e-10),
        Check("conj_antihomomorphism", float(conj_err), 1e-12),
        Check("adjoint_homomorphism", hom, 1e-10),
        Check("adjoint_preserves_form", metric, 1e-10),
        Check("adjoint_orthochronous_det1", so_plus, 1e-10),
        Check("lambda_relations", bmodule.split_quaternionic_residual(bmodule.CALIBRATED, 2), 1e-12),
        Check("su2_jacobi_invariance", max(lie.antisymmetry, lie.jacobi, lie.ad_invariance), 1e-12),
    ]


def flat_suite(n_values=(0, 1, 2), points: int = 1000, seed: int = 0) -> list[Check]:
    """rho_2 and chi_2 vanish and rho_0 = |h|^2 / 2 on the flat model."""
    rho2 = chi2 = rho0 = 0.0
    for n in n_values:
        for row in permuting.flat_obstruction_rows(n, points, seed):
            rho2 = max(rho2, row["rho2_max"])
            chi2 = max(chi2, row["chi2_max"])
            rho0 = max(rho0, abs(row["rho0"] - row["half_norm_sq"]))
    return [
        Check("rho2_vanishes", rho2, 1e-10),
        Check("chi2_vanishes", chi2, 1e-10),
        Check("rho0_half_norm", rho0, 1e-12),
    ]


def sasakian_suite(n: int, points: int, seed: int = 0) -> list[Check]:
    rep = sasakian.contact_suite(n, points, seed)
    d = rep.as_dict()
    tols = {
        "lengths": 1e-10, "phi_square": 1e-10, "eta_of_reeb": 1e-10, "eta_of_phi": 1e-10,
        "metric_compat": 1e-10, "bracket": 1e-10, "d_eta": 1e-6, "normality": 1e-6,
    }
    checks = [Check(k, float(d[k]), tol) for k, tol in tols.items()]
    sph = sasakian.Sphere(n)
    rng = np.random.default_rng(seed + 1)
    pts = sph.random_points(rng, max(1, min(points, 10)))
    hor = max(sasakian.horizontal_invariance(sph, p) for p in pts)
    ohat = max(sasakian.omega_hat_agreement(sph, p, seed=seed) for p in pts)
    su11 = max(sasakian.su11_invariance_check(sph, p, q, 3, seed) for p, q in zip(pts, random_units(rng, len(pts))))
    checks += [
        Check("horizontal_invariance", float(hor), 1e-10),
        Check("omega_hat_agreement", float(ohat), 1e-9),
        Check("su11_invariance", float(su11), 1e-9),
    ]
    return checks


def nahm_anchor(k: float = 1.0, steps: int = 1000) -> dict:
    """Sup-error against the closed form, conserved drift and observed order."""
    L = liealg.su2()
    exact = nahm.exact_trajectory(k, steps)
    traj = nahm.integrate(L, exact.states[0], 1.0, steps)
    err = float(np.max(np.abs(traj.states - exact.states)))
    drift = float(np.ptp(nahm.conserved_series(traj)))
    coarse = nahm.integrate(L, exact.states[0], 1.0, 50)
    fine = nahm.integrate(L, exact.states[0], 1.0, 100)
    e1 = np.max(np.abs(coarse.states - nahm.exact_trajectory(k, 50).states))
    e2 = np.max(np.abs(fine.states - nahm.exact_trajectory(k, 100).states))
    return {"sup_error": err, "drift": drift, "order": float(np.log2(e1 / e2))}
