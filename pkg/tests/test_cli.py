import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from splitgeom import __version__, nahm
from splitgeom.cli import main


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


@pytest.fixture
def init_file(tmp_path):
    s = nahm.exact_solution(1.0, 0.0)[0]
    path = tmp_path / "init.json"
    path.write_text(json.dumps({f"T{a}": s[a].tolist() for a in range(4)}))
    return path


def test_verify_algebra_passes_and_reports(tmp_path):
    out = tmp_path / "alg.json"
    assert main(["verify-algebra", "--pairs", "2000", "--units", "200", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["passed"] is True
    assert data["version"] == __version__
    assert data["sign_table"]
    assert {c["name"] for c in data["checks"]} >= {"mul_table", "norm_multiplicative", "adjoint_homomorphism"}


def test_injected_fault_exits_one_and_names_check(tmp_path, capsys):
    out = tmp_path / "alg.json"
    code = main(["verify-algebra", "--pairs", "500", "--units", "50", "--inject-fault", "--out", str(out)])
    assert code == 1
    assert "FAIL mul_table" in capsys.readouterr().err
    failed = {c["name"] for c in json.loads(out.read_text())["checks"] if not c["passed"]}
    assert "mul_table" in failed


def test_malformed_config_exits_two(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[verify-algebra\npairs = ")
    assert main(["verify-algebra", "--config", str(cfg)]) == 2
    cfg.write_text('[verify-algebra]\npairs = "many"\n')
    assert main(["verify-algebra", "--config", str(cfg)]) == 2
    cfg.write_text("[verify-algebra]\nbogus = 1\n")
    assert main(["verify-algebra", "--config", str(cfg)]) == 2


def test_usage_errors_exit_two(tmp_path):
    assert main(["no-such-command"]) == 2
    assert main(["nahm", "degeneracy-scan", "--family", "const-t9"]) == 2
    assert main(["nahm", "run", "--init", str(tmp_path / "missing.json")]) == 2


def test_flat_obstruction_csv(tmp_path):
    out = tmp_path / "flat.csv"
    assert main(["flat-obstruction", "--n", "1", "--points", "200", "--out", str(out)]) == 0
    raw = out.read_bytes()
    assert raw.count(b"\r\n") == 201
    header, rows = read_csv(out)
    assert header == ["index", "norm_sq", "rho0", "half_norm_sq", "rho2_max", "chi2_max"]
    vals = np.array(rows, dtype=float)
    assert vals[:, 4].max() <= 1e-10
    assert np.max(np.abs(vals[:, 2] - vals[:, 3])) <= 1e-12


def test_config_merged_with_flag_override(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("[flat-obstruction]\nn = 0\npoints = 7\nseed = 3\n")
    out = tmp_path / "flat.csv"
    rep = tmp_path / "flat.json"
    assert main(["flat-obstruction", "--config", str(cfg), "--points", "11", "--out", str(out), "--report", str(rep)]) == 0
    _, rows = read_csv(out)
    assert len(rows) == 11
    conf = json.loads(rep.read_text())["config"]
    assert (conf["n"], conf["points"], conf["seed"]) == (0, 11, 3)


def test_verify_sasakian(tmp_path):
    out = tmp_path / "sas.json"
    assert main(["verify-sasakian", "--n", "1", "--points", "20", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["passed"] is True


def test_nahm_run_conserved_column(tmp_path, init_file):
    out = tmp_path / "run.csv"
    assert main(["nahm", "run", "--init", str(init_file), "--steps", "400", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header[0] == "t" and header[-1] == "conserved" and len(header) == 14
    cons = np.array([r[-1] for r in rows], dtype=float)
    assert len(cons) == 401
    assert np.ptp(cons) <= 1e-10


def test_degeneracy_scan_root_file(tmp_path):
    out = tmp_path / "scan.csv"
    args = ["nahm", "degeneracy-scan", "--family", "const-t2", "--from", "0.5", "--to", "4",
            "--samples", "30", "--steps", "400", "--out", str(out)]
    assert main(args) == 0
    header, rows = read_csv(tmp_path / "scan.csv.roots.csv")
    assert header == ["root"]
    roots = [float(r[0]) for r in rows]
    assert len(roots) == 1 and abs(roots[0] - np.pi) <= 1e-6
    header, rows = read_csv(out)
    assert header == ["param", "det", "min_sv", "indicator"] and len(rows) == 30


def test_repeated_runs_are_byte_identical(tmp_path, init_file, monkeypatch):
    d = tmp_path / "out"
    d.mkdir()

    def run(threads):
        monkeypatch.setenv("SPLITGEOM_THREADS", threads)
        for p in d.iterdir():
            p.unlink()
        assert main(["verify-algebra", "--pairs", "1000", "--units", "100", "--seed", "7", "--out", str(d / "a.json")]) == 0
        assert main(["flat-obstruction", "--points", "50", "--seed", "7", "--out", str(d / "f.csv")]) == 0
        assert main(["nahm", "run", "--init", str(init_file), "--steps", "400", "--out", str(d / "r.csv")]) == 0
        assert main(["nahm", "degeneracy-scan", "--samples", "12", "--steps", "200", "--out", str(d / "s.csv")]) == 0
        return {p.name: p.read_bytes() for p in sorted(d.iterdir())}

    first = run("1")
    assert len(first) == 5
    assert first == run("1")
    assert first == run("4")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "splitgeom", "--version"], capture_output=True, text=True)
    assert res.returncode == 0
    assert __version__ in res.stdout
