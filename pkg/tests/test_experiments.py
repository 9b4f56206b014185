import csv
import json
import math

import numpy as np
import pytest

from schrodg.basis import SpaceKind
from schrodg.cli import main
from schrodg.experiments import (CSV_COLUMNS, ExperimentConfig, loglog_slope,
                                 run_conv_h, run_conv_p, run_singular, verify_basis,
                                 write_rows_csv)


def test_config_requires_two_levels():
    with pytest.raises(ValueError):
        ExperimentConfig("conv-h", levels=1)


def test_conv_h_constant_data_exact():
    cfg = ExperimentConfig("conv-h", space=SpaceKind.trefftz(1), levels=2,
                           constant_data=True)
    rows = run_conv_h(cfg)
    for r in rows:
        assert r.dg_error <= 1e-12
        assert r.rate is None  # flagged: below the roundoff floor


def test_conv_h_rates_recomputable_from_errors():
    cfg = ExperimentConfig("conv-h", space=SpaceKind.trefftz(1), levels=3)
    rows = run_conv_h(cfg)
    assert rows[0].rate is None
    for prev, cur in zip(rows, rows[1:]):
        assert cur.rate == pytest.approx(math.log2(prev.dg_error / cur.dg_error))
        assert cur.h_x == pytest.approx(prev.h_x / 2)


def test_conv_p_dof_column_formula():
    cfg = ExperimentConfig("conv-p", space=SpaceKind.trefftz(1), levels=2)
    rows = run_conv_p(cfg)
    for r in rows:
        assert r.n_dofs == 100 * (2 * r.level + 1)
    assert len(rows) == 2 and rows[0].rate is None


def test_conv_p_single_entry():
    rows = run_conv_p(ExperimentConfig("conv-p", space=SpaceKind.trefftz(1), levels=1))
    assert len(rows) == 1 and rows[0].rate is None


def test_conv_h_p0_does_not_converge():
    cfg = ExperimentConfig("conv-h", space=SpaceKind.trefftz(0), levels=2)
    rows = run_conv_h(cfg)
    assert all(r.dg_error > 1.0 for r in rows)   # O(1) errors
    assert abs(rows[1].rate) < 0.5               # rate ~ 0


def test_loglog_slope_recovers_power():
    hs = [0.1 / 2 ** j for j in range(4)]
    vals = [3.0 * h ** 2 for h in hs]
    assert loglog_slope(hs, vals) == pytest.approx(2.0, abs=1e-12)


def test_singular_explicit_space_restricts_families():
    cfg = ExperimentConfig("singular", space=SpaceKind.quasi_trefftz(1), levels=2,
                           all_spaces=False)
    res = run_singular(cfg)
    assert list(res["tables"]) == ["quasi-trefftz"]
    errs = [r.dg_error for r in res["tables"]["quasi-trefftz"]]
    assert all(e is not None for e in errs)


def test_verify_basis_report_shape():
    rep = verify_basis(p_max=2, dims=(1, 2))
    assert rep["all_pass"]
    assert {(e["d"], e["p"]) for e in rep["entries"]} == {(1, 1), (1, 2), (2, 1), (2, 2)}
    for e in rep["entries"]:
        assert e["dim"] == e["expected_dim"] == math.comb(2 * e["p"] + e["d"], e["d"])
        assert e["trefftz_residual"] <= 1e-13
        assert e["trace_reconstruction_error"] <= 1e-12


def test_verify_basis_dump_serializes(tmp_path):
    rep = verify_basis(p_max=1, dims=(1,), dump_basis=True)
    assert "bases" in rep and "d1_p1" in rep["bases"]
    json.dumps(rep)  # must be JSON-ready


def test_csv_columns_exact(tmp_path):
    cfg = ExperimentConfig("conv-h", space=SpaceKind.trefftz(1), levels=2,
                           constant_data=True)
    rows = run_conv_h(cfg)
    out = tmp_path / "rows.csv"
    write_rows_csv(rows, out)
    with open(out) as fh:
        header = next(csv.reader(fh))
    assert tuple(header) == CSV_COLUMNS == ("level", "h_x", "h_t", "n_dofs",
                                            "dg_error", "rate", "cond2")


def test_cli_invalid_config_exit_code(tmp_path, capsys):
    assert main(["conv-h", "--levels", "1", "--out", str(tmp_path / "x.csv")]) == 3
    assert main(["conv-h", "--space", "planewave", "--p", "0",
                 "--out", str(tmp_path / "y.csv")]) == 3


def test_cli_unknown_experiment_exits_3(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 3


def test_cli_verify_basis(tmp_path):
    out = tmp_path / "report.json"
    assert main(["verify-basis", "--p", "2", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["all_pass"]


def test_cli_conv_h_runs_and_is_deterministic(tmp_path):
    args = ["conv-h", "--p", "1", "--levels", "2", "--quad-n", "12"]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert json.loads(out1.with_suffix(".json").read_text())["error_slope"] is not None
    with open(out1) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert float(rows[1]["rate"]) > 0.5


def test_cli_conv_p(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["conv-p", "--levels", "2", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["level"]) for r in rows] == [1, 2]
    assert float(rows[1]["dg_error"]) < float(rows[0]["dg_error"])
    summary = json.loads(out.with_suffix(".json").read_text())
    assert summary["ill_conditioned_p"] == []


def test_cli_conditioning_writes_both_choices(tmp_path):
    out = tmp_path / "cond.csv"
    assert main(["conditioning", "--p", "1", "--levels", "2", "--out", str(out)]) == 0
    assert (tmp_path / "cond_choice_a.csv").exists()
    assert (tmp_path / "cond_choice_b.csv").exists()
    summary = json.loads(out.with_suffix(".json").read_text())
    assert set(summary["slopes"]) == {"a", "b"}


def test_cli_singular_writes_per_space(tmp_path):
    out = tmp_path / "sing.csv"
    assert main(["singular", "--p", "1", "--levels", "2", "--out", str(out)]) == 0
    for family in ("trefftz", "quasi-trefftz", "full", "planewave"):
        assert (tmp_path / f"sing_{family}.csv").exists()
