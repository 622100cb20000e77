import os
import subprocess
import sys
from pathlib import Path

import pytest

from cuspfield import svgplot


def run_cli(args, env_extra=None, cwd=None):
    env = os.environ.copy()
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "cuspfield.cli", *args],
        capture_output=True,
        text=True,
        env=env,
        cwd=cwd,
    )


def test_no_arguments_is_usage_error():
    res = run_cli([])
    assert res.returncode == 2


def test_unknown_subcommand_is_usage_error():
    res = run_cli(["frobnicate"])
    assert res.returncode == 2


def test_dispersion_prints_csv_row():
    res = run_cli(["dispersion", "--lambda", "2", "--mu", "1", "--rho", "1"])
    assert res.returncode == 0
    lines = res.stdout.strip().split("\n")
    assert lines[0] == "cP,cS,cR"
    cp, cs, cr = (float(v) for v in lines[1].split(","))
    assert abs(cp - 2.0) < 1e-10
    assert abs(cs - 1.0) < 1e-10
    assert abs(cr - 0.9325259059) < 1e-9


def test_projections_prints_reference_constants():
    res = run_cli(["projections", "--q", "1"])
    assert res.returncode == 0
    lines = res.stdout.strip().split("\n")
    assert lines[0].startswith("C_kappa_re")
    vals = [float(v) for v in lines[1].split(",")]
    assert abs(vals[0] - 5.920160973) < 1e-6
    assert abs(vals[3] - (-3.640899899)) < 1e-6
    assert abs(vals[4] - (-2.976857206)) < 1e-6


def test_horn_writes_outputs(tmp_path):
    res = run_cli(["horn", "--out", str(tmp_path)])
    assert res.returncode == 0
    csv_path = tmp_path / "horn_eps.csv"
    assert csv_path.exists()
    assert (tmp_path / "horn_eps.svg").exists()
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == "eps,max_error"
    assert len(lines) == 6
    assert "slope" in res.stdout


def test_out_root_precedence(tmp_path):
    env_dir = tmp_path / "from_env"
    flag_dir = tmp_path / "from_flag"
    res = run_cli(["overlap"], env_extra={"CUSP_OUT": str(env_dir)})
    assert res.returncode == 0
    assert (env_dir / "overlap.csv").exists()
    res = run_cli(
        ["overlap", "--out", str(flag_dir)], env_extra={"CUSP_OUT": str(env_dir)}
    )
    assert res.returncode == 0
    assert (flag_dir / "overlap.csv").exists()


def test_default_out_is_cwd_out(tmp_path):
    res = run_cli(["overlap"], cwd=str(tmp_path))
    assert res.returncode == 0
    assert (tmp_path / "out" / "overlap.csv").exists()


def test_config_file_and_flag_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("lambda = 3.0  # stiffer\nmu = 1.0\n")
    res = run_cli(["--config", str(conf), "dispersion"])
    assert res.returncode == 0
    cp = float(res.stdout.strip().split("\n")[1].split(",")[0])
    assert abs(cp - 5.0**0.5) < 1e-9
    # explicit flag beats the config value
    res = run_cli(["--config", str(conf), "dispersion", "--lambda", "2"])
    cp = float(res.stdout.strip().split("\n")[1].split(",")[0])
    assert abs(cp - 2.0) < 1e-9


def test_malformed_config_is_runtime_error(tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("this line has no equals sign\n")
    res = run_cli(["--config", str(conf), "dispersion"])
    assert res.returncode == 1
    assert "error" in res.stderr


def test_module_error_maps_to_exit_one(tmp_path):
    res = run_cli(["gorge-model", "--nu", "0.7", "--out", str(tmp_path)])
    assert res.returncode == 1
    assert "error" in res.stderr


def test_gorge_model_csv(tmp_path):
    res = run_cli(["gorge-model", "--out", str(tmp_path)])
    assert res.returncode == 0
    lines = (tmp_path / "gorge_model.csv").read_text().strip().split("\n")
    assert lines[0] == "r,stress_magnitude,local_slope"
    first = [float(v) for v in lines[1].split(",")]
    assert abs(first[2] - (-0.4993)) < 0.002


def test_outputs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        res = run_cli(["overlap", "--out", str(out)])
        assert res.returncode == 0
    assert (a / "overlap.csv").read_bytes() == (b / "overlap.csv").read_bytes()
    assert (a / "overlap.svg").read_bytes() == (b / "overlap.svg").read_bytes()


def test_report_summarises_existing_csv(tmp_path):
    assert run_cli(["horn", "--out", str(tmp_path)]).returncode == 0
    assert run_cli(["overlap", "--out", str(tmp_path)]).returncode == 0
    res = run_cli(["report", "--out", str(tmp_path)])
    assert res.returncode == 0
    summary = (tmp_path / "summary.csv").read_text().strip().split("\n")
    assert summary[0] == "experiment,quantity,predicted,observed,r_squared,points"
    names = {line.split(",")[0] for line in summary[1:]}
    assert names == {"horn_eps", "overlap"}
    horn_row = next(line for line in summary[1:] if line.startswith("horn_eps"))
    observed = float(horn_row.split(",")[3])
    assert abs(observed - 4.0) < 0.05


def test_report_without_csv_fails(tmp_path):
    res = run_cli(["report", "--out", str(tmp_path)])
    assert res.returncode == 1
    assert "error" in res.stderr


def test_fem_gorge_cli_smoke(tmp_path):
    res = run_cli(
        ["fem-gorge", "--out", str(tmp_path), "--nx", "40", "--nz", "28",
         "--n-side", "28"],
    )
    assert res.returncode == 0
    lines = (tmp_path / "gorge_rings.csv").read_text().strip().split("\n")
    assert lines[0] == "r,percentile_stress"
    assert len(lines) == 9


def test_svg_renderer_structure():
    rows = [(0.01, 100.0), (0.1, 10.0), (1.0, 1.0)]
    svg = svgplot.render_loglog(rows, "demo", "x", "y")
    assert svg.startswith("<svg ")
    assert svg.rstrip().endswith("</svg>")
    assert svg.count("<circle") == 3
    assert "slope = -1.0000" in svg
    assert "1e-1" in svg and "1e0" in svg
    with pytest.raises(ValueError):
        svgplot.render_loglog(rows[:1], "demo", "x", "y")
    with pytest.raises(ValueError):
        svgplot.render_loglog([(0.0, 1.0), (1.0, 1.0)], "demo", "x", "y")


def test_svg_csv_wrapper_matches_direct():
    csv_text = "r,mag\n0.5,2\n1,1\n2,0.5\n"
    direct = svgplot.render_loglog([(0.5, 2.0), (1.0, 1.0), (2.0, 0.5)], "t", "r", "mag")
    assert svgplot.render_csv_plot(csv_text, "t") == direct
    with pytest.raises(ValueError):
        svgplot.render_csv_plot("r,mag\n1,1\n", "t")
