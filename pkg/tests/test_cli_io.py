"""Delimited formats, the run manifest, report rendering, and the CLI."""
import json

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from hermite_vasicek import cli
from hermite_vasicek.errors import ConfigurationError, FormatError
from hermite_vasicek.fileio import (RunManifest, config_from_mapping,
                                    config_to_mapping, parse_config_file,
                                    read_manifest, read_path_csv,
                                    read_raw_csv, write_manifest,
                                    write_path_csv, write_rate_points_csv,
                                    write_raw_csv, write_summary_csv)
from hermite_vasicek.harness import (ESTIMATOR_COLUMNS, GT_COLUMNS, MCConfig,
                                     run_consistency, run_distribution,
                                     run_gt_converge, run_rate)
from hermite_vasicek.hermite import HermiteSpec, simulate_hermite
from hermite_vasicek.paths import GridSpec
from hermite_vasicek.reports import render_report
from hermite_vasicek.vasicek import VasicekParams

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _config(experiment, q=1, hurst=0.6, horizons=(5.0, 10.0), dt=0.1,
            replications=8, master_seed=11):
    return MCConfig(spec=HermiteSpec(q=q, hurst=hurst),
                    params=VasicekParams(a=1.0, b=2.0), horizons=horizons,
                    dt=dt, replications=replications,
                    master_seed=master_seed, experiment=experiment)


def test_path_csv_round_trip(tmp_path):
    path = simulate_hermite(HermiteSpec(q=1, hurst=0.7),
                            GridSpec(horizon=2.0, n=32), seed=9)
    dest = tmp_path / "p.csv"
    write_path_csv(path, dest)
    back = read_path_csv(dest)
    assert_array_equal(back.values, path.values)
    assert back.grid == path.grid
    assert np.min(path.values) < 0.0  # negatives survive the trip


def _write(tmp_path, text):
    dest = tmp_path / "bad.csv"
    dest.write_text(text)
    return dest


@pytest.mark.parametrize("text,fragment", [
    ("", "empty"),
    ("x,y\n0,1\n1,2\n", "header"),
    ("t,value\n0,1\n", "at least 2 rows"),
    ("t,value\n0,1\n0.5,2,9\n", "row 2"),
    ("t,value\n0,1\n0.5,oops\n", "column 'value'"),
    ("t,value\n0.5,1\n1,2\n", "start at 0"),
    ("t,value\n0,1\n0.5,2\n0.9,3\n1.5,4\n", "row 3"),
    ("t,value\n0,1\n0.5,nan\n1,2\n", "row 2: value is not finite"),
])
def test_path_csv_rejects_malformed(tmp_path, text, fragment):
    with pytest.raises(FormatError, match=fragment):
        read_path_csv(_write(tmp_path, text))


def test_raw_csv_round_trip(tmp_path):
    res = run_consistency(_config("consistency"))
    dest = tmp_path / "raw.csv"
    write_raw_csv(res, dest)
    header, rows = read_raw_csv(dest)
    assert header == ESTIMATOR_COLUMNS
    assert rows == [tuple(row) for row in res.rows]
    assert all(isinstance(r[1], int) and isinstance(r[3], float)
               for r in rows)


def test_gt_raw_csv_round_trip(tmp_path):
    res = run_gt_converge(_config("gt-converge", q=2, hurst=0.7,
                                  horizons=(2.0, 4.0), dt=1.0 / 256,
                                  replications=4), refinement=4)
    dest = tmp_path / "raw.csv"
    write_raw_csv(res, dest)
    header, rows = read_raw_csv(dest)
    assert header == GT_COLUMNS
    assert rows == [tuple(row) for row in res.rows]


def test_raw_csv_rejects_unknown_header(tmp_path):
    with pytest.raises(FormatError, match="unrecognized"):
        read_raw_csv(_write(tmp_path, "a,b,c\n1,2,3\n"))


def test_summary_and_rate_points(tmp_path):
    res = run_rate(_config("rate", horizons=(5.0, 10.0, 20.0),
                           replications=12))
    summary = tmp_path / "s.csv"
    write_summary_csv(res, summary)
    lines = summary.read_text().splitlines()
    assert lines[0].split(",")[:4] == ["horizon", "count", "excluded",
                                       "mean_a"]
    assert len(lines) == 4

    points = tmp_path / "p.csv"
    write_rate_points_csv(res, points)
    rows = points.read_text().splitlines()
    assert rows[0] == "logT,log_sd_a,log_sd_b"
    first = rows[1].split(",")
    assert float(first[0]) == pytest.approx(np.log(5.0))

    dist = run_distribution(_config("distribution", horizons=(50.0,),
                                    dt=0.25, replications=30))
    write_rate_points_csv(dist, tmp_path / "d.csv")
    assert len((tmp_path / "d.csv").read_text().splitlines()) == 2

    bad = run_consistency(_config("consistency"))
    with pytest.raises(ConfigurationError):
        write_rate_points_csv(bad, tmp_path / "nope.csv")


def test_parse_config_file(tmp_path):
    src = tmp_path / "run.cfg"
    src.write_text("# comment line\n"
                   "q = 1\n"
                   "hurst = 0.6  # inline comment\n"
                   "\n"
                   "dt=0.05\n")
    assert parse_config_file(src) == {"q": "1", "hurst": "0.6", "dt": "0.05"}

    src.write_text("q = 1\nq = 2\n")
    with pytest.raises(FormatError, match="line 2: duplicate"):
        parse_config_file(src)
    src.write_text("q 1\n")
    with pytest.raises(FormatError, match="line 1"):
        parse_config_file(src)
    src.write_text("q =\n")
    with pytest.raises(FormatError, match="line 1"):
        parse_config_file(src)


def test_config_mapping_round_trip():
    cfg = _config("rate", horizons=(5.0, 12.5, 20.0))
    assert config_from_mapping(config_to_mapping(cfg)) == cfg


def test_config_mapping_rejects_bad_keys_and_values():
    cfg = _config("consistency")
    mapping = config_to_mapping(cfg)
    with pytest.raises(ConfigurationError, match="unknown"):
        config_from_mapping({**mapping, "rho": "1"})
    short = dict(mapping)
    del short["dt"]
    with pytest.raises(ConfigurationError, match="missing"):
        config_from_mapping(short)
    with pytest.raises(ConfigurationError, match="bad configuration value"):
        config_from_mapping({**mapping, "q": "banana"})


def test_manifest_round_trip(tmp_path):
    res = run_consistency(_config("consistency"))
    manifest = RunManifest.for_result(res, outputs=("raw.csv", "s.csv"))
    dest = tmp_path / "run_manifest.json"
    write_manifest(manifest, dest)
    assert read_manifest(dest) == manifest
    assert not list(tmp_path.glob("*.tmp"))
    assert config_from_mapping(read_manifest(dest).config) == res.config


def test_manifest_missing_field(tmp_path):
    dest = tmp_path / "m.json"
    dest.write_text(json.dumps({"version": 1}))
    with pytest.raises(FormatError, match="missing field"):
        read_manifest(dest)


@pytest.mark.parametrize("experiment,kwargs", [
    ("consistency", {}),
    ("rate", {"horizons": (5.0, 10.0, 20.0), "replications": 12}),
    ("distribution", {"horizons": (50.0,), "dt": 0.25, "replications": 30}),
    ("gt-converge", {"q": 2, "hurst": 0.7, "horizons": (2.0, 4.0),
                     "dt": 1.0 / 256}),
])
def test_render_report_writes_png(tmp_path, experiment, kwargs):
    cfg = _config(experiment, **kwargs)
    runner = {"consistency": run_consistency, "rate": run_rate,
              "distribution": run_distribution,
              "gt-converge": run_gt_converge}[experiment]
    res = runner(cfg, refinement=4)
    (fig,) = render_report(res, tmp_path, "report")
    assert fig.name == "report.png"
    assert fig.read_bytes()[:8] == PNG_MAGIC


def test_cli_simulate_estimate_round_trip(tmp_path, capsys):
    out = tmp_path / "x.csv"
    rc = cli.main(["simulate", "--q", "1", "--hurst", "0.7",
                   "--horizon", "2", "--n", "64", "--seed", "5",
                   "--a", "1.2", "--b", "0.4", "--output", str(out)])
    assert rc == 0 and out.exists()
    rc = cli.main(["estimate", "--q", "1", "--hurst", "0.7",
                   "--input", str(out)])
    assert rc == 0
    values = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert values["horizon"] == 2.0
    assert np.isfinite(values["a_hat"])
    assert np.isfinite(values["b_hat"])


def test_cli_short_flag_aliases(tmp_path, capsys):
    out = tmp_path / "y.csv"
    rc = cli.main(["simulate", "--q", "1", "--H", "0.7", "--T", "2",
                   "--n", "64", "--seed", "5", "--out", str(out)])
    assert rc == 0 and out.exists()
    rc = cli.main(["estimate", "--in", str(out), "--q", "1", "--H", "0.7"])
    assert rc == 0
    assert "a_hat" in capsys.readouterr().out


def test_cli_estimate_malformed_input_is_runtime_error(tmp_path, capsys):
    bad = _write(tmp_path, "t,value\n0,1\n0.7,2\n1.0,3\n")
    rc = cli.main(["estimate", "--q", "1", "--hurst", "0.7",
                   "--input", str(bad)])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_cli_usage_errors_exit_1():
    with pytest.raises(SystemExit) as exc:
        cli.main(["simulate", "--q", "1"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 1


def test_cli_constants_selects_defined_quantities(capsys):
    assert cli.main(["constants", "--q", "1", "--hurst", "0.6"]) == 0
    text = capsys.readouterr().out
    assert "sigma_h = 0.974719" in text
    assert "b_constant" not in text
    assert '"case_id": "GaussianSubcritical"' in text

    assert cli.main(["constants", "--q", "2", "--hurst", "0.7"]) == 0
    text = capsys.readouterr().out
    assert "sigma_h" not in text
    assert "b_constant = 0.97137" in text


def test_cli_mc_consistency_writes_artifacts(tmp_path, capsys):
    rc = cli.main(["mc-consistency", "--q", "1", "--hurst", "0.6",
                   "--a", "1", "--b", "2", "--horizons", "5,10",
                   "--dt", "0.1", "--replications", "6",
                   "--master-seed", "3", "--outdir", str(tmp_path),
                   "--stem", "demo"])
    assert rc == 0
    for suffix in ("_raw.csv", "_summary.csv", ".png", "_manifest.json"):
        assert (tmp_path / f"demo{suffix}").exists()
    assert (tmp_path / "demo.png").read_bytes()[:8] == PNG_MAGIC
    manifest = read_manifest(tmp_path / "demo_manifest.json")
    assert "demo_raw.csv" in manifest.outputs
    assert manifest.config["replications"] == "6"
    assert "mean_abs_err_a" in capsys.readouterr().out


def test_cli_config_file_with_flag_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("q = 1\nhurst = 0.6\na = 1\nb = 2\n"
                   "horizons = 5,10\ndt = 0.1\nreplications = 4\n"
                   "master_seed = 3\n")
    rc = cli.main(["mc-consistency", "--config", str(cfg),
                   "--replications", "6", "--outdir", str(tmp_path)])
    assert rc == 0
    manifest = read_manifest(tmp_path / "consistency_manifest.json")
    assert manifest.config["replications"] == "6"
    assert manifest.config["experiment"] == "consistency"


def test_cli_output_dir_env_honored(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HERMITE_VASICEK_OUTDIR", str(tmp_path))
    rc = cli.main(["simulate", "--q", "1", "--hurst", "0.7", "--horizon",
                   "1", "--n", "16", "--seed", "1"])
    assert rc == 0
    assert (tmp_path / "path.csv").exists()
    capsys.readouterr()


def test_cli_mc_dist_writes_points_csv(tmp_path, capsys):
    rc = cli.main(["mc-dist", "--q", "1", "--hurst", "0.6", "--a", "1",
                   "--b", "2", "--horizons", "50", "--dt", "0.25",
                   "--replications", "30", "--master-seed", "1",
                   "--outdir", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "distribution_points.csv").exists()
    assert "ks_a" in capsys.readouterr().out


def test_cli_mc_dist_rejects_non_gaussian_limit(tmp_path, capsys):
    rc = cli.main(["mc-dist", "--q", "2", "--hurst", "0.7", "--a", "1",
                   "--b", "2", "--horizons", "5,10", "--dt", "0.1",
                   "--replications", "4", "--master-seed", "1",
                   "--outdir", str(tmp_path)])
    assert rc == 2
    assert "error:" in capsys.readouterr().err
