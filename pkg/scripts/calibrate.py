"""Recompute the sign and normalisation constants and write src/splitgeom/constants.py.

    python scripts/calibrate.py           # rewrite constants.py
    python scripts/calibrate.py --check   # exit 1 if the file is stale
"""

import argparse
import sys
from pathlib import Path

from splitgeom.permuting import calibrate_sign_table
from splitgeom.sasakian import calibrate_conventions

TARGET = Path(__file__).resolve().parents[1] / "src" / "splitgeom" / "constants.py"


def render() -> str:
    table, scores = calibrate_sign_table()
    conv = calibrate_conventions()
    lines = [
        "# Generated by scripts/calibrate.py -- do not edit by hand.",
        f"SIGN_TABLE = {table.signs!r}",
        f"SASAKI_EPSILON = {tuple(conv.epsilon)!r}",
        f"D_ETA_COEFF = {tuple(conv.d_eta)!r}",
        f"NORMALITY_COEFF = {tuple(conv.normality)!r}",
        f"BRACKET_SIGN = {conv.bracket_sign!r}",
    ]
    for s in scores:
        print(f"{str(s.table):10s} passed={s.passed}", file=sys.stderr)
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare instead of writing")
    args = ap.parse_args(argv)
    text = render()
    if args.check:
        same = TARGET.read_text(encoding="utf-8") == text
        print("constants up to date" if same else "constants.py is stale")
        return 0 if same else 1
    TARGET.write_text(text, encoding="utf-8")
    print(f"wrote {TARGET}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
