"""Degeneracy roots of the constant-T2 family before and after the scaling symmetry.

A root c* of the unscaled family should move to c*/a after scaling by a.
"""

import argparse
import sys

import numpy as np

from splitgeom import nahm


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default="const-t2")
    ap.add_argument("--scales", type=float, nargs="+", default=[0.5, 1.25, 2.0])
    ap.add_argument("--from", dest="start", type=float, default=0.5)
    ap.add_argument("--to", dest="stop", type=float, default=8.0)
    ap.add_argument("--samples", type=int, default=120)
    ap.add_argument("--steps", type=int, default=1000)
    args = ap.parse_args(argv)

    params = np.linspace(args.start, args.stop, args.samples)
    # Roots of the scaled family at c correspond to unscaled roots at a c.
    lo, hi = args.start * min(args.scales), args.stop * max(args.scales)
    wide = np.linspace(lo, hi, int(args.samples * (hi - lo) / (args.stop - args.start)) + 1)
    base = nahm.degeneracy_scan(nahm.get_family(args.family, args.steps), wide).roots
    print("scale,root,predicted,error")
    for a in args.scales:
        roots = nahm.degeneracy_scan(nahm.get_family(args.family, args.steps, scale=a), params).roots
        for r in roots:
            pred = min((b / a for b in base), key=lambda x: abs(x - r), default=float("nan"))
            print(f"{a:g},{r:.17g},{pred:.17g},{abs(r - pred):.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
