import csv
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from psifrac import make_psi
from psifrac.cli import main
from psifrac.suite import (ConfigError, RegimeSpec, VariantSpec, build_groups, format_float,
                           parse_config, parse_function_spec, render_csv, run_groups, thread_count)

ROOT = Path(__file__).resolve().parents[1]
SMOKE = ROOT / "fixtures" / "smoke.toml"
HEADER = "instance_id,theorem,part,regime,psi,function,alpha,param,lhs,rhs,margin,status"

MINI = """
alpha = [{alpha}]
functions = [{functions}]
regimes = [{regimes}]
variants = ["midpoint"]

[[psi]]
kind = "identity"
domain = [0.0, 1.0]
"""


def write(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def run_cli(*args, env=None):
    return subprocess.run([sys.executable, "-m", "psifrac", *map(str, args)], capture_output=True,
                          text=True, env={**os.environ, **(env or {})})


def test_smoke_fixture_passes_and_is_deterministic(tmp_path):
    first = run_cli("verify", SMOKE, "--out-dir", tmp_path / "a")
    second = run_cli("verify", SMOKE, "--out-dir", tmp_path / "b", env={"PSIFRAC_THREADS": "4"})
    assert first.returncode == 0 and second.returncode == 0, first.stderr
    for name in ("smoke_report.csv", "smoke_summary.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    lines = (tmp_path / "a" / "smoke_report.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == HEADER and len(lines) == 1 + 216
    assert not any(line.endswith(",fail") for line in lines)


def test_empty_function_list_is_a_config_error(tmp_path, capsys):
    cfg = write(tmp_path, MINI.format(alpha="0.5", functions="", regimes='"Linf"'))
    assert main(["verify", str(cfg), "--out-dir", str(tmp_path)]) == 2
    assert "no test functions" in capsys.readouterr().err


@pytest.mark.parametrize("text", ["alpha = [", 'alpha = [0.5]\nfunctions = ["flat:r=1"]\n'])
def test_broken_configs_exit_2(tmp_path, text):
    assert main(["verify", str(write(tmp_path, text)), "--out-dir", str(tmp_path)]) == 2
    assert main(["verify", str(tmp_path / "missing.toml")]) == 2


def test_precondition_gate_marks_skips(tmp_path):
    cfg = write(tmp_path, MINI.format(alpha="0.4, 0.1", functions='"flat:r=1"', regimes='"Lqpsi:q=5", "L1psi"'))
    assert main(["verify", str(cfg), "--out-dir", str(tmp_path)]) == 0
    with open(tmp_path / "cfg.csv", encoding="utf-8", newline="") as fh:
        status = {(r["regime"], r["alpha"]): r["status"] for r in csv.DictReader(fh)}
    assert status[("Lqpsi(p=1.25;q=5)", "0.4")] == "pass"
    assert status[("Lqpsi(p=1.25;q=5)", "0.1")] == "skipped: α≤1/q"
    assert status[("L1psi", "0.4")] == "skipped: α<1"


def test_as_printed_flag_adds_comparison_rows(tmp_path):
    cfg = write(tmp_path, MINI.format(alpha="1.5", functions='"polynomial:coeffs=0,1,1"', regimes='"L1psi"'))
    assert main(["verify", str(cfg), "--out-dir", str(tmp_path), "--as-printed-326"]) == 0
    lines = (tmp_path / "cfg.csv").read_text(encoding="utf-8").splitlines()
    assert any("L1psi[printed]" in line and line.rsplit(",", 1)[1].startswith("compare:") for line in lines)


def test_dt_measure_can_fail(tmp_path):
    text = MINI.replace('kind = "identity"\ndomain = [0.0, 1.0]', 'kind = "log"\ndomain = [1.0, 2.718281828459045]')
    cfg = write(tmp_path, text.format(alpha="0.5", functions='"constant:c=1"', regimes='"Linf"')
                .replace('["midpoint"]', '["split:frac=0.1"]'))
    assert main(["verify", str(cfg), "--out-dir", str(tmp_path)]) == 0
    assert main(["verify", str(cfg), "--out-dir", str(tmp_path), "--measure", "dt"]) == 1


def test_operator_table(capsys):
    assert main(["operator", "--side", "left", "--psi", "identity", "--alpha", "0.5",
                 "--fn", "monomial:beta=1", "--points", "0", "0.25", "1.0"]) == 0
    rows = [line.split() for line in capsys.readouterr().out.splitlines()[1:]]
    assert rows[-1][2] == "1.128379167095513"
    assert rows[1][2] == "0.564189583547756"
    assert float(rows[0][1]) == 0.0
    assert main(["operator", "--psi", "log", "--domain", "1,e", "--alpha", "0.3",
                 "--fn", "constant:c=2", "--points", "1.5", "2"]) == 0
    rows = [line.split() for line in capsys.readouterr().out.splitlines()[1:]]
    assert all(float(r[2]) == 0.0 for r in rows)


def test_sweep_footers(tmp_path, capsys):
    assert main(["sweep", "--fn", "polynomial:coeffs=0,1,1", "--alpha", "0.5", "--grid", "101"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "s,lhs,rhs,margin" and len(out) == 103
    assert out[-1].startswith("# argmin s=0.5 ")
    assert main(["sweep", "--fn", "polynomial:coeffs=0,1,1", "--alpha", "1", "--regime", "L1psi",
                 "--grid", "11"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "# constant bracket; minimizer degenerate"
    target = tmp_path / "alpha.csv"
    assert main(["sweep", "--variable", "alpha", "--fn", "flat:r=1", "--grid", "9",
                 "--out", str(target)]) == 0
    rhs = np.array([float(line.split(",")[2]) for line in target.read_text().splitlines()[1:]])
    assert rhs.size == 9 and np.all(np.isfinite(rhs)) and np.all(rhs > 0)


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["operator", "--alpha", "0.5"],
    ["operator", "--alpha", "0.5", "--fn", "bogus:x=1", "--points", "0.5"],
    ["operator", "--alpha", "0.5", "--psi", "power", "--fn", "monomial:beta=1", "--points", "0.5"],
    ["sweep", "--fn", "flat:r=1", "--regime", "L1psi", "--alpha", "0.5"],
])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        sys.exit(main(argv))
    assert exc.value.code == 2


def test_spec_parsers():
    assert RegimeSpec.parse("Lqpsi:p=3").label == "Lqpsi(p=3;q=1.5)"
    assert RegimeSpec.parse("linf").label == "Linf"
    with pytest.raises(ConfigError):
        RegimeSpec.parse("Lqpsi:p=1")
    v = VariantSpec.parse("partition:i=1,m=3")
    assert (v.i, v.m) == (1, 3)
    with pytest.raises(ConfigError):
        VariantSpec.parse("diagonal")
    psi = make_psi("identity", (), (0, 1))
    fns = parse_function_spec("random:count=3", psi, np.random.default_rng(0))
    assert len(fns) == 3
    assert format_float(2 / 3) == "0.666666666666667"


def test_threads_env(monkeypatch):
    monkeypatch.setenv("PSIFRAC_THREADS", "0")
    assert thread_count() == (os.cpu_count() or 1)
    monkeypatch.setenv("PSIFRAC_THREADS", "x")
    with pytest.raises(ConfigError):
        thread_count()


def test_parallel_rows_keep_config_order():
    cfg = parse_config({"psi": [{"kind": "log", "domain": [1, 2.718281828459045]}],
                        "functions": ["flat:r=1", "polynomial:coeffs=1,2", "flat:r=2"],
                        "alpha": [0.5, 1.5], "regimes": ["Linf", "Lqpsi:p=2"],
                        "variants": ["midpoint", "trapezoid"]})
    groups = build_groups(cfg)
    assert render_csv(run_groups(groups, 1)) == render_csv(run_groups(groups, 4))
