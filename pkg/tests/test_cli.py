from __future__ import annotations

import csv
import io
import json
import math

import pytest

from bgls.cli import EXIT_COMPUTATION, EXIT_OK, EXIT_USAGE, emit_sweep, main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_boyd_example(capsys):
    code, out, _ = _run(capsys, "boyd", "--interval", "2,4", "--psi", "canonical", "--levels", "6")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["quantity"] == "boyd_curve"
    slopes = [row[-1] for row in doc["rows"] if row[1] == "upper"]
    assert slopes[-1] == pytest.approx(0.5, rel=1e-3)


def test_criteria_table(capsys):
    code, out, _ = _run(capsys, "criteria", "--interval", "2,4")
    assert code == EXIT_OK
    rows = json.loads(out)["rows"]
    assert [r[0] for r in rows] == ["P_alpha", "Q_beta", "maximal", "hilbert", "fourier"]
    assert all(r[2] is True for r in rows)


def test_fundfn_csv_has_provenance_and_13_rows(capsys):
    code, out, _ = _run(capsys, "fundfn", "--interval", "2,4", "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "# quantity, grid_kind, tolerance, version"
    assert lines[1].startswith("# fundamental_function, delta, 1e-10, ")
    data = list(csv.reader(l for l in lines if not l.startswith("#")))
    assert data[0] == ["delta", "phi"]
    assert len(data) == 14
    # phi(1) = 1 / min psi for the canonical psi; just check monotonicity here
    phis = [float(r[1]) for r in data[1:]]
    assert all(x < y for x, y in zip(phis, phis[1:]))


def test_output_is_deterministic(capsys, tmp_path):
    args = ["dilation-norm", "--interval", "2,4", "--s", "3", "--format", "csv"]
    first = _run(capsys, *args)[1]
    second = _run(capsys, *args)[1]
    assert first == second
    target = tmp_path / "out.csv"
    assert main(args + ["--out", str(target)]) == EXIT_OK
    assert target.read_text() == first


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("command = fundfn\ninterval = 2,4\ns = 1, 10\nformat = csv\n")
    code, out, _ = _run(capsys, "--config", str(cfg), "--s", "100")
    assert code == EXIT_OK
    rows = [l for l in out.splitlines() if l and not l.startswith("#")]
    assert rows[1:] and rows[1].startswith("100.0,")
    assert len(rows) == 2


@pytest.mark.parametrize("argv", [
    ["norm", "--interval", "2,4", "--psi", "powr(1,0,0)"],
    ["norm"],
    ["fundfn", "--interval", "4,2"],
    ["bogus"],
    ["norm", "--interval", "2,4", "--format", "xml"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = _run(capsys, *argv)
    assert code == EXIT_USAGE
    assert out == ""


def test_psi_error_names_line_and_column(capsys):
    _, _, err = _run(capsys, "norm", "--interval", "2,4", "--psi", "powr(1,0,0)")
    assert "--psi" in err and "line 1, column 1" in err


def test_singular_matrix_exits_3(capsys):
    code, _, err = _run(capsys, "matrix-dilation", "--interval", "2,4", "--matrix", "1,2,2,4")
    assert code == EXIT_COMPUTATION
    assert "computation failed in" in err


def test_emit_sweep_round_trips():
    buf = io.StringIO()
    grid = [10.0 ** k for k in range(-6, 7)]
    vals = [math.sqrt(x) / 3.0 for x in grid]
    emit_sweep("phi", grid, vals, buf, tolerance=1e-10)
    rows = [l for l in buf.getvalue().splitlines() if not l.startswith("#")]
    assert rows[0] == "x,value"
    assert [float(r.split(",")[1]) for r in rows[1:]] == vals
    assert len(rows) == 14


def test_emit_sweep_rejects_bad_input():
    with pytest.raises(ValueError):
        emit_sweep("phi", [], [], io.StringIO())
    with pytest.raises(ValueError):
        emit_sweep("phi", [1.0, 2.0], [1.0], io.StringIO())
