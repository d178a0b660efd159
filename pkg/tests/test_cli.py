import pathlib

import pytest

from beamsim.cli import main
from beamsim.presets import preset_text

TOY = (pathlib.Path(__file__).parent / "golden").parent


CONFIG = """\
id = "clitoy"

[array]
sensors = 2

[noise]
power = 0.04

[[sources]]
doa_deg = 90.0
power_db_rel_soi = 0.0

[run]
snapshots = 5
runs = 2
master_seed = 3

[mechanism.fss]
mu = 1e-3

[mechanism.mass]
alpha = 0.9
gamma = 1e-2
mu0 = 1e-3
mu_min = 1e-5
mu_max = 5e-3
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "toy.toml"
    path.write_text(CONFIG)
    return path


def test_run_writes_csv_and_summary(config_file, tmp_path, capsys):
    out = tmp_path / "out.csv"
    assert main(["run", "--config", str(config_file), "--out", str(out)]) == 0
    assert out.exists()
    assert (tmp_path / "out.csv.summary").exists()
    stdout = capsys.readouterr().out
    assert "clitoy fss" in stdout and "clitoy mass" in stdout


def test_byte_identical_reruns(config_file, tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    main(["run", "--config", str(config_file), "--out", str(first)])
    main(["run", "--config", str(config_file), "--out", str(second)])
    assert first.read_bytes() == second.read_bytes()
    assert (tmp_path / "a.csv.summary").read_bytes() == (tmp_path / "b.csv.summary").read_bytes()


def test_seed_and_runs_overrides(config_file, tmp_path):
    base = tmp_path / "base.csv"
    reseeded = tmp_path / "seed.csv"
    main(["run", "--config", str(config_file), "--out", str(base)])
    main(["run", "--config", str(config_file), "--out", str(reseeded), "--seed", "42"])
    assert base.read_bytes() != reseeded.read_bytes()
    main(["run", "--config", str(config_file), "--out", str(reseeded), "--runs", "1"])


def test_mechanism_filter(config_file, tmp_path):
    out = tmp_path / "out.csv"
    assert main(["run", "--config", str(config_file), "--out", str(out), "--mechanisms", "mass"]) == 0
    body = out.read_text()
    assert ",mass," in body and ",fss," not in body


def test_mechanism_filter_rejects_unknown(config_file, tmp_path, capsys):
    code = main([
        "run", "--config", str(config_file), "--out", str(tmp_path / "x.csv"),
        "--mechanisms", "rls",
    ])
    assert code == 2
    assert "unknown mechanism" in capsys.readouterr().err


def test_mechanism_filter_rejects_unconfigured(config_file, tmp_path, capsys):
    code = main([
        "run", "--config", str(config_file), "--out", str(tmp_path / "x.csv"),
        "--mechanisms", "taass",
    ])
    assert code == 2
    assert "not configured" in capsys.readouterr().err


def test_counters_flag_extends_header(config_file, tmp_path):
    out = tmp_path / "out.csv"
    main(["run", "--config", str(config_file), "--out", str(out), "--counters"])
    assert out.read_text().splitlines()[0].endswith(",adds_per_update,mults_per_update")


def test_bound_report_flag_adds_summary_section(config_file, tmp_path):
    out = tmp_path / "out.csv"
    main(["run", "--config", str(config_file), "--out", str(out), "--bound-report"])
    assert "bound_mu_max:" in (tmp_path / "out.csv.summary").read_text()


def test_workers_flag_is_deterministic(config_file, tmp_path):
    serial = tmp_path / "serial.csv"
    parallel = tmp_path / "parallel.csv"
    main(["run", "--config", str(config_file), "--out", str(serial)])
    main(["run", "--config", str(config_file), "--out", str(parallel), "--workers", "2"])
    assert serial.read_bytes() == parallel.read_bytes()


def test_bad_config_reports_error(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("id = 'x'\n[array]\nsensors = 0\n")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "o.csv")]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.toml"), "--out", "o.csv"]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_presets_list(capsys):
    assert main(["presets", "list"]) == 0
    names = capsys.readouterr().out.split()
    assert names == ["scenario1", "scenario1_mismatch", "scenario2"]


def test_presets_dump_roundtrip(capsys):
    assert main(["presets", "dump", "scenario1"]) == 0
    assert capsys.readouterr().out == preset_text("scenario1")


def test_presets_dump_unknown(capsys):
    assert main(["presets", "dump", "nope"]) == 2
    assert "no preset named" in capsys.readouterr().err
