import json
import os
import subprocess
import sys

import pytest

from qzeta.cli import SCHEMA, main
from qzeta.linear_forms import LinearForm


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_zeta_eval(capsys):
    code, out = run(["zeta", "eval", "--s", "1", "--q", "1/2"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == SCHEMA and rep["pass"]
    assert "1.606695152415291763" in out


def test_form_verify_zeta_three_case(capsys):
    code, out = run(["form", "verify", "--A", "4", "--r", "1", "--n", "0", "--q", "1/2"], capsys)
    assert code == 0 and json.loads(out)["pass"]


def test_form_build_roundtrips(capsys, tmp_path):
    path = tmp_path / "form.json"
    code, _ = run(["form", "build", "--A", "6", "--r", "2", "--n", "1", "--output", str(path)], capsys)
    assert code == 0
    rep = json.loads(path.read_text())
    form = LinearForm.from_json(rep["results"][0])
    assert form.params.A == 6 and sorted(form.p_hat_odd) == [3, 5]


def test_criterion_check(capsys):
    code, out = run(["criterion", "check"], capsys)
    assert code == 0 and json.loads(out)["pass"]


@pytest.mark.parametrize("fmt", ["csv", "text"])
def test_other_formats(capsys, fmt):
    code, out = run(["criterion", "table", "--A", "4..12", "--format", fmt], capsys)
    assert code == 0 and out.strip()
    if fmt == "csv":
        assert out.splitlines()[0].startswith("A,")


def test_failing_fixture_exits_one(capsys):
    code, out = run(["denom", "verify", "--A", "4", "--r", "1", "--n", "2..3", "--d-power-drop", "2"], capsys)
    assert code == 1
    assert json.loads(out)["pass"] is False


def test_passing_denominators(capsys):
    code, _ = run(["denom", "verify", "--A", "4", "--r", "1", "--n", "1..2"], capsys)
    assert code == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["zeta", "eval", "--q", "2"],
        ["zeta", "eval", "--q", "abc"],
        ["form", "build", "--A", "5"],
        ["form", "build", "--n", "3..1"],
        ["criterion", "check", "--jobs", "0"],
        ["nosuch"],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_reports_are_deterministic(capsys):
    argv = ["identity", "verify", "--n-max", "3", "--instances", "6", "--seed", "7"]
    first = run(argv, capsys)
    second = run(argv, capsys)
    assert first == second and first[0] == 0
    assert json.loads(first[1])["config"]["seed"] == 7


def test_parallel_and_serial_reports_match(capsys):
    argv = ["form", "verify", "--A", "4", "--n", "1..3", "--q", "1/2"]
    assert run(argv, capsys) == run(argv + ["--jobs", "2"], capsys)


def test_console_entry_point(tmp_path):
    env = dict(os.environ, QZETA_PRECISION="128")
    out = tmp_path / "z.json"
    proc = subprocess.run(
        [sys.executable, "-m", "qzeta.cli", "zeta", "eval", "--s", "3", "--q", "1/3", "-o", str(out)],
        env=env,
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["config"]["precision"] == 128
