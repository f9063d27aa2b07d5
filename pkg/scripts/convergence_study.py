"""RK4 convergence on the closed-form tanh/sech solution of the reduced equations."""

import argparse
import sys

import numpy as np

from splitgeom import nahm
from splitgeom.liealg import su2


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=float, default=1.0)
    ap.add_argument("--steps", type=int, nargs="+", default=[25, 50, 100, 200, 400, 800])
    args = ap.parse_args(argv)

    L = su2()
    print("steps,sup_error,observed_order,conserved_drift")
    prev = None
    for n in args.steps:
        exact = nahm.exact_trajectory(args.k, n)
        traj = nahm.integrate(L, exact.states[0], 1.0, n)
        err = float(np.max(np.abs(traj.states - exact.states)))
        order = "" if prev is None else f"{np.log2(prev[1] / err) / np.log2(n / prev[0]):.4f}"
        drift = float(np.ptp(nahm.conserved_series(traj)))
        print(f"{n},{err:.6e},{order},{drift:.3e}")
        prev = (n, err)
    return 0


if __name__ == "__main__":
    sys.exit(main())
