import subprocess
import sys

import pytest

from contraswarm.cli import main

CONFIG = """
[run]
scenario = pd
metrics = si_local, cooperation_fraction
[pd]
size = 15
population = 60
rounds = 5
"""


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "pd.ini"
    path.write_text(CONFIG)
    return path


def test_run_and_plot(tmp_path, config):
    out = tmp_path / "run"
    assert main(["run", "--config", str(config), "--out", str(out), "--seed", "3"]) == 0
    assert (out / "metrics.csv").exists() and (out / "summary.json").exists()
    svg = tmp_path / "c.svg"
    assert main(["plot", "--in", str(out / "metrics.csv"), "--metric",
                 "cooperation_fraction", "--out", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")
    assert main(["plot", "--in", str(out / "metrics.csv"), "--metric", "absent",
                 "--out", str(svg)]) == 2


def test_sweep(tmp_path, config):
    out = tmp_path / "sw"
    code = main(["sweep", "--config", str(config), "--vary", "pd.mobility=off,on",
                 "--replicates", "2", "--out", str(out)])
    assert code == 0
    assert {p.name for p in out.iterdir()} == {"metrics.csv", "medians.csv", "summary.json"}
    assert main(["sweep", "--config", str(config), "--vary", "pd.bogus=1",
                 "--out", str(out)]) == 2


def test_config_errors_exit_2(tmp_path, config):
    assert main(["run", "--config", str(tmp_path / "none.ini"), "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[run]\nscenario = geese\n[geese]\nflock = 3\n")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 2


@pytest.mark.parametrize("argv", [
    ["run", "--config", "x.ini", "--out", "o", "--seed", "-4"],
    ["run", "--config", "x.ini"],
    ["sweep", "--config", "x.ini", "--vary", "a=1", "--replicates", "0", "--out", "o"],
    ["fly"],
])
def test_bad_arguments_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_runtime_failure_exit_1(tmp_path, config):
    blocker = tmp_path / "file"
    blocker.write_text("")
    # the output path runs through a regular file
    assert main(["run", "--config", str(config), "--out", str(blocker / "out")]) == 1


def test_module_entry_point(tmp_path, config):
    out = tmp_path / "m"
    proc = subprocess.run([sys.executable, "-m", "contraswarm", "run", "--config", str(config),
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "contraswarm", "run", "--config",
                           str(tmp_path / "none.ini"), "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "config error" in proc.stderr
