"""Command-line driver: verification suites, Nahm-Schmid runs and degeneracy scans.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration error.
Settings come from dataclass defaults, then an optional TOML file (one table
per subcommand, e.g. ``[flat-obstruction]``), then command-line flags.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__, nahm, permuting, suites
from .bmodule import CALIBRATED
from .liealg import DimensionMismatch, load_algebra

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


# -- configs ---------------------------------------------------------------------

@dataclass
class AlgebraConfig:
    seed: int = 0
    pairs: int = 10_000
    units: int = 1_000
    out: str | None = None
    inject_fault: bool = False

    def validate(self):
        _positive(self, "pairs", "units")


@dataclass
class FlatConfig:
    n: int = 1
    points: int = 1000
    seed: int = 0
    tol_rho2: float = 1e-10
    tol_rho0: float = 1e-12
    out: str | None = None
    report: str | None = None

    def validate(self):
        if self.n < 0:
            raise ConfigError("n must be >= 0")
        _positive(self, "points", "tol_rho2", "tol_rho0")


@dataclass
class SasakianConfig:
    n: int = 1
    points: int = 100
    seed: int = 0
    out: str | None = None

    def validate(self):
        _positive(self, "n", "points")


@dataclass
class NahmRunConfig:
    algebra: str = "su2"
    init: str | None = None
    steps: int = 1000
    length: float = 1.0
    reduced: bool = True
    tol: float = 1e-10
    out: str | None = None

    def validate(self):
        if self.steps < 2:
            raise ConfigError("steps must be >= 2")
        _positive(self, "length", "tol")
        if self.init is None:
            raise ConfigError("--init is required")
        if not Path(self.init).is_file():
            raise ConfigError(f"init file {self.init} does not exist")


@dataclass
class ScanConfig:
    family: str = "const-t2"
    start: float = 0.5
    stop: float = 4.0
    samples: int = 100
    steps: int = 1000
    scale: float | None = None
    xtol: float = 1e-10
    out: str | None = None
    roots_out: str | None = None

    def validate(self):
        if self.steps < 2:
            raise ConfigError("steps must be >= 2")
        if self.samples < 2:
            raise ConfigError("samples must be >= 2")
        if not self.stop > self.start:
            raise ConfigError("--to must exceed --from")
        if self.family not in nahm.FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; known: {sorted(nahm.FAMILIES)}")
        if self.scale is not None and not self.scale > 0:
            raise ConfigError("scale must be positive")
        _positive(self, "xtol")


def _positive(cfg, *names):
    for name in names:
        if not getattr(cfg, name) > 0:
            raise ConfigError(f"{name} must be positive")


def build_config(cls, section: str, args: argparse.Namespace):
    """Defaults < TOML section < flags."""
    values = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "rb") as fh:
                data = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file {args.config} not found") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed config {args.config}: {exc}") from None
        table = data.get(section, {})
        if not isinstance(table, dict):
            raise ConfigError(f"[{section}] must be a table")
        known = {f.name for f in fields(cls)}
        unknown = set(table) - known
        if unknown:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")
        values.update(table)
    for f in fields(cls):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    try:
        cfg = cls(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    for f in fields(cls):
        v = getattr(cfg, f.name)
        expected = {int: int, float: (int, float), bool: bool}.get(type(f.default))
        if expected and v is not None and (not isinstance(v, expected) or (expected is int and isinstance(v, bool))):
            raise ConfigError(f"{f.name} has invalid value {v!r}")
    try:
        cfg.validate()
    except TypeError as exc:
        raise ConfigError(f"invalid value in [{section}]: {exc}") from None
    return cfg


# -- output helpers -----------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, header: list[str], rows) -> None:
    out = sys.stdout if path in (None, "-") else open(path, "w", newline="", encoding="utf-8")
    try:
        w = csv.writer(out, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    finally:
        if out is not sys.stdout:
            out.close()


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def report(command: str, cfg, checks: list[suites.Check], extra: dict | None = None) -> dict:
    return _jsonable(
        {
            "tool": "splitgeom",
            "version": __version__,
            "command": command,
            "sign_table": str(CALIBRATED),
            "config": dataclasses.asdict(cfg),
            "checks": [c.as_dict() for c in checks],
            "passed": suites.all_passed(checks),
            **(extra or {}),
        }
    )


def write_json(path, data: dict) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _summarise(checks) -> int:
    for c in checks:
        if not c.passed:
            print(f"FAIL {c.name}: residual {c.residual:.3e} > tol {c.tol:.1e}", file=sys.stderr)
    return EXIT_OK if suites.all_passed(checks) else EXIT_FAIL


# -- subcommands ----------------------------------------------------------------

def cmd_verify_algebra(args) -> int:
    cfg = build_config(AlgebraConfig, "verify-algebra", args)
    table = suites.faulty_table() if cfg.inject_fault else None
    kw = {} if table is None else {"table": table}
    checks = suites.algebra_suite(n_pairs=cfg.pairs, n_units=cfg.units, seed=cfg.seed, **kw)
    write_json(cfg.out, report("verify-algebra", cfg, checks))
    return _summarise(checks)


def cmd_flat_obstruction(args) -> int:
    cfg = build_config(FlatConfig, "flat-obstruction", args)
    rows = permuting.flat_obstruction_rows(cfg.n, cfg.points, cfg.seed)
    header = ["index", "norm_sq", "rho0", "half_norm_sq", "rho2_max", "chi2_max"]
    write_csv(cfg.out, header, ([r[k] for k in header] for r in rows))
    checks = [
        suites.Check("rho2_vanishes", max(r["rho2_max"] for r in rows), cfg.tol_rho2),
        suites.Check("rho0_half_norm", max(abs(r["rho0"] - r["half_norm_sq"]) for r in rows), cfg.tol_rho0),
    ]
    if cfg.report:
        write_json(cfg.report, report("flat-obstruction", cfg, checks))
    return _summarise(checks)


def cmd_verify_sasakian(args) -> int:
    cfg = build_config(SasakianConfig, "verify-sasakian", args)
    checks = suites.sasakian_suite(cfg.n, cfg.points, cfg.seed)
    write_json(cfg.out, report("verify-sasakian", cfg, checks))
    return _summarise(checks)


def read_init(path: str, dim: int) -> np.ndarray:
    """JSON {"T0": [...], "T1": [...], "T2": [...], "T3": [...]}; missing T0 means zero."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed init file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("init file must hold an object with keys T0..T3")
    state = np.zeros((4, dim))
    for k in range(4):
        key = f"T{k}"
        if key not in data:
            if k == 0:
                continue
            raise ConfigError(f"init file lacks {key}")
        v = np.asarray(data[key], dtype=float)
        if v.shape != (dim,):
            raise ConfigError(f"{key} has length {v.size}, algebra has dimension {dim}")
        state[k] = v
    return state


def cmd_nahm_run(args) -> int:
    cfg = build_config(NahmRunConfig, "nahm-run", args)
    try:
        L = load_algebra(cfg.algebra)
    except (OSError, ValueError, DimensionMismatch) as exc:
        raise ConfigError(f"cannot load algebra {cfg.algebra!r}: {exc}") from None
    init = read_init(cfg.init, L.dim)
    traj = nahm.integrate(L, init, cfg.length, cfg.steps, cfg.reduced)
    cons = nahm.conserved_series(traj)
    d = L.dim
    header = ["t"] + [f"T{a}_{k}" for a in range(4) for k in range(d)] + ["conserved"]
    rows = ([t, *traj.states[j].reshape(-1), cons[j]] for j, t in enumerate(traj.t_grid))
    write_csv(cfg.out, header, rows)
    drift = float(np.max(np.abs(cons - cons[0])))
    return _summarise([suites.Check("conserved_drift", drift, cfg.tol)])


def cmd_nahm_scan(args) -> int:
    cfg = build_config(ScanConfig, "nahm-degeneracy-scan", args)
    family = nahm.get_family(cfg.family, cfg.steps, cfg.scale)
    params = np.linspace(cfg.start, cfg.stop, cfg.samples)
    res = nahm.degeneracy_scan(family, params, xtol=cfg.xtol)
    write_csv(cfg.out, ["param", "det", "min_sv", "indicator"], ([r["param"], r["det"], r["min_sv"], r["indicator"]] for r in res.rows))
    roots_path = cfg.roots_out or (f"{cfg.out}.roots.csv" if cfg.out not in (None, "-") else None)
    if roots_path is not None:
        write_csv(roots_path, ["root"], ([r] for r in res.roots))
    else:
        print("roots: " + " ".join(_fmt(r) for r in res.roots), file=sys.stderr)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="splitgeom", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="TOML file; flags override its values")
        return sp

    a = common(sub.add_parser("verify-algebra", help="split-quaternion and Lie algebra invariants"))
    a.add_argument("--seed", type=int)
    a.add_argument("--pairs", type=int, help="random pairs for norm multiplicativity")
    a.add_argument("--units", type=int, help="random unit pairs for the adjoint checks")
    a.add_argument("--out", help="JSON report path (default stdout)")
    a.add_argument("--inject-fault", action="store_true", default=None, help=argparse.SUPPRESS)
    a.set_defaults(func=cmd_verify_algebra)

    f = common(sub.add_parser("flat-obstruction", help="rho0 and rho2 on the flat model"))
    f.add_argument("--n", type=int, help="quaternionic dimension minus one")
    f.add_argument("--points", type=int)
    f.add_argument("--seed", type=int)
    f.add_argument("--out", help="CSV path (default stdout)")
    f.add_argument("--report", help="optional JSON report path")
    f.set_defaults(func=cmd_flat_obstruction)

    s = common(sub.add_parser("verify-sasakian", help="split 3-Sasakian checks on the pseudo-sphere"))
    s.add_argument("--n", type=int)
    s.add_argument("--points", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", help="JSON report path (default stdout)")
    s.set_defaults(func=cmd_verify_sasakian)

    n = sub.add_parser("nahm", help="Nahm-Schmid equations")
    nsub = n.add_subparsers(dest="nahm_command", required=True)
    r = common(nsub.add_parser("run", help="integrate from initial data"))
    r.add_argument("--algebra", help='"su2", "u1^n" or a JSON structure-constant file')
    r.add_argument("--init", help='JSON {"T0": [...], "T1": [...], "T2": [...], "T3": [...]}')
    r.add_argument("--steps", type=int)
    r.add_argument("--length", type=float)
    g = r.add_mutually_exclusive_group()
    g.add_argument("--reduced", dest="reduced", action="store_true", default=None)
    g.add_argument("--full", dest="reduced", action="store_false")
    r.add_argument("--tol", type=float, help="allowed drift of the conserved quantity")
    r.add_argument("--out", help="CSV path (default stdout)")
    r.set_defaults(func=cmd_nahm_run)

    d = common(nsub.add_parser("degeneracy-scan", help="scan a family for degenerate solutions"))
    d.add_argument("--family", help=f"one of {sorted(nahm.FAMILIES)}")
    d.add_argument("--from", dest="start", type=float)
    d.add_argument("--to", dest="stop", type=float)
    d.add_argument("--samples", type=int)
    d.add_argument("--steps", type=int)
    d.add_argument("--scale", type=float, help="apply the scaling symmetry with this factor")
    d.add_argument("--xtol", type=float, help="bisection tolerance")
    d.add_argument("--out", help="CSV path (default stdout)")
    d.add_argument("--roots-out", help="root CSV path (default <out>.roots.csv)")
    d.set_defaults(func=cmd_nahm_scan)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
