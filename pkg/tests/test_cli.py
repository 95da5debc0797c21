import csv
import io

import pytest

from equichern import checks as ck
from equichern import report as rp
from equichern.cli import build_config, main, read_config_file, run_checks

FAST = "algebra.exponential_bound,plane_rotation.D_lambda"


def test_list_shows_every_check(capsys):
    assert main(["list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert [l.split("\t")[0] for l in lines] == sorted(ck.CHECKS)


def test_zero_tolerance_is_an_error(capsys):
    assert main(["run", "--check", FAST, "--tol", "0"]) == 2
    assert "tolerance" in capsys.readouterr().err


def test_empty_selector_gives_empty_report(capsys):
    assert main(["run", "--check", ""]) == 0
    out = capsys.readouterr().out
    header = rp.parse(out).header
    assert header["n_checks"] == "0" and header["status"] == "PASS"
    assert "[check" not in out


def test_unknown_check_is_an_error(capsys):
    assert main(["run", "--check", "no.such_check"]) == 2
    assert "no.such_check" in capsys.readouterr().err


def test_selection_by_short_name():
    names = [c.name for c in ck.select("plane_rotation", "D_lambda")]
    assert names == ["plane_rotation.D_lambda"]
    assert ck.select("all", "") == []


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nseed = 5\ngrid = 4\nT = 20\n")
    values = read_config_file(cfg)
    assert values == {"seed": 5, "grid": 4, "T": 20.0}
    config = build_config({"seed": 9, "grid": None}, values)
    assert (config.seed, config.grid, config.T) == (9, 4, 20.0)
    assert build_config({}, {}).grid == ck.RunConfig().grid
    cfg.write_text("colour = blue\n")
    with pytest.raises(ValueError):
        read_config_file(cfg)


def test_failing_check_sets_exit_status(capsys):
    assert main(["run", "--check", "algebra.volterra_exponential", "--tol", "1e-30"]) == 1
    assert main(["run", "--check", "plane_rotation.D_lambda", "--grid", "3"]) == 0


def test_report_roundtrip(tmp_path, capsys):
    out = tmp_path / "res"
    assert main(["run", "--check", FAST, "--out", str(out), "--timings"]) == 0
    text = capsys.readouterr().out
    assert (out / "report.txt").read_text() == text
    stored = rp.parse(text)
    assert [c["name"] for c in stored.checks] == sorted(FAST.split(","))
    for block in stored.checks:
        assert "wall_time" in block
        assert len(block["residual"].split("e")[0].replace("-", "").replace(".", "")) == 17
    assert (out / "summary.csv").exists() and (out / "timings.csv").exists()
    assert main(["report", str(out)]) == 0
    table = capsys.readouterr().out
    assert "plane_rotation.D_lambda" in table


def test_wall_time_hidden_by_default():
    config = ck.RunConfig(check=FAST)
    text = rp.render(config, run_checks(config))
    assert "wall_time" not in text


def test_parallel_runs_match_serial():
    serial = rp.render(ck.RunConfig(check=FAST), run_checks(ck.RunConfig(check=FAST)))
    par = ck.RunConfig(check=FAST, jobs=3)
    assert rp.render(ck.RunConfig(check=FAST), run_checks(par)) == serial


def test_decay_csv(tmp_path, capsys):
    path = tmp_path / "decay.csv"
    assert main(["decay", "--profile", "gaussian", "--order", "96", "--out", str(path)]) == 0
    rows = list(csv.reader(io.StringIO(path.read_text())))
    assert rows[0] == ["t_or_radius", "norm", "fitted_window_flag"]
    assert len(rows) > 10
    assert "log_slope" in capsys.readouterr().err


def test_plane_rotation_localization_passes_with_defaults():
    result = ck.execute(ck.CHECKS["plane_rotation.localization"], ck.RunConfig())
    assert result.passed
