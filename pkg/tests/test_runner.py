import csv
import json
import math
import statistics

import pytest

from contraswarm import runner
from contraswarm.scenarios import ConfigError

PD_SMALL = """
[run]
scenario = pd
seed = 5
metrics = si_local, swarm_potential, si_global, cooperation_fraction

[pd]
size = 20
population = 120
rounds = 12
mobility = true
"""

GEESE_SMALL = """
[run]
scenario = geese
steps = 15
"""


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_run_is_byte_deterministic(tmp_path):
    cfg = runner.parse_config(PD_SMALL)
    runner.run(cfg, tmp_path / "a")
    runner.run(cfg, tmp_path / "b")
    for name in ("metrics.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_csv_layout(tmp_path):
    cfg = runner.parse_config(PD_SMALL)
    runner.run(cfg, tmp_path)
    rows = read_rows(tmp_path / "metrics.csv")
    assert rows[0] == ["run_id", "seed", "step", "metric", "value"]
    body = rows[1:]
    assert len(body) == 12 * len(cfg.metrics)
    assert {r[0] for r in body} == {"pd-s5"} and {r[1] for r in body} == {"5"}
    assert [r[3] for r in body[:len(cfg.metrics)]] == list(cfg.metrics)
    for r in body:
        assert r[4] == "%.9g" % float(r[4])
    assert b"\r\n" not in (tmp_path / "metrics.csv").read_bytes()


def test_metric_names_expand_per_contradiction():
    cfg = runner.parse_config(GEESE_SMALL)
    assert cfg.metrics == ("si_local.c1", "si_local.c2", "swarm_potential.c1",
                           "swarm_potential.c2", "si_global", "joint_entropy")
    assert cfg.steps == 15


def test_summary_keys(tmp_path):
    cfg = runner.parse_config(GEESE_SMALL)
    runner.run(cfg, tmp_path)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert set(summary) == {"run_id", "scenario", "seed", "steps", "bins", "metrics",
                            "assertion1", "model"}
    assert summary["steps"] == 15 and summary["model"]["flock"] == 12
    assert summary["assertion1"]["verdict"] in ("PASS", "FAIL")
    assert set(summary["metrics"]["si_global"]) == {"first", "last", "min", "max"}


def test_fmt():
    assert runner.fmt(-0.0) == "0"
    assert runner.fmt(1 / 3) == "0.333333333"
    assert runner.fmt(math.nan) == "nan"


def test_sweep_medians_recomputed(tmp_path):
    cfg = runner.parse_config(PD_SMALL)
    param, values = runner.parse_vary(cfg, "pd.mobility=off,on")
    assert values == [False, True]
    summary = runner.sweep(cfg, param, values, 3, tmp_path)
    assert summary["values"] == ["mobility=off", "mobility=on"]

    runs = read_rows(tmp_path / "metrics.csv")[1:]
    assert {r[0] for r in runs} == {f"mobility={v}-r{r}" for v in ("off", "on") for r in range(3)}
    assert {r[1] for r in runs if r[0].endswith("-r2")} == {"7"}
    groups = {}
    for run_id, _, step, metric, value in runs:
        groups.setdefault((run_id.rsplit("-", 1)[0], step, metric), []).append(float(value))
    medians = read_rows(tmp_path / "medians.csv")
    assert medians[0] == ["series", "step", "metric", "value"]
    for series, step, metric, value in medians[1:]:
        assert float(value) == pytest.approx(statistics.median(groups[series, step, metric]),
                                             abs=1e-9)
    last = summary["final_medians"]["mobility=on"]["cooperation_fraction"]
    assert last == pytest.approx(statistics.median(groups["mobility=on", "12",
                                                          "cooperation_fraction"]))


def test_single_replicate_median_is_the_run(tmp_path):
    cfg = runner.parse_config(PD_SMALL)
    runner.sweep(cfg, "pd.population", [100], 1, tmp_path)
    runs = read_rows(tmp_path / "metrics.csv")[1:]
    meds = read_rows(tmp_path / "medians.csv")[1:]
    assert [r[2:] for r in runs] == [r[1:] for r in meds]


def test_read_series_round_trip(tmp_path):
    cfg = runner.parse_config(PD_SMALL)
    result = runner.run(cfg, tmp_path)
    data = runner.read_series(tmp_path / "metrics.csv")
    pts = data["cooperation_fraction"]["pd-s5"]
    assert [s for s, _ in pts] == list(range(1, 13))
    assert [v for _, v in pts] == pytest.approx(result.series["cooperation_fraction"])
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        runner.read_series(bad)


def test_nan_efficiency_becomes_null(tmp_path):
    text = """
[run]
scenario = ants
steps = 3
metrics = mean_route_efficiency
[ants]
grid = 20
ants = 5
source_min_distance = 8
source_max_distance = 9
"""
    runner.run(runner.parse_config(text), tmp_path)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["metrics"]["mean_route_efficiency"]["last"] is None
    assert read_rows(tmp_path / "metrics.csv")[1][4] == "nan"


@pytest.mark.parametrize("text", [
    "[pd]\nsize = 10\n",
    "[run]\nscenario = bees\n",
    "[run]\nscenario = pd\n[pd]\ncolour = red\n",
    "[run]\nscenario = pd\nsteps = 10\n",
    "[run]\nscenario = pd\nmetrics = nothing\n",
    "[run]\nscenario = pd\nseed = -1\n",
    "[run]\nscenario = pd\n[pd]\nmobility = maybe\n",
    "[run]\nscenario = geese\n[geese]\nflock = 30\n",
    "[run]\nscenario = geese\n[pd]\nsize = 10\n",
    "[run]\nscenario = pd\nfoo = 1\n",
    "not an ini file",
])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        runner.parse_config(text)


def test_vary_errors():
    cfg = runner.parse_config(PD_SMALL)
    for text in ("pd.population", "pd.nope=1", "pd.population=abc", "pd.population=0"):
        with pytest.raises(ConfigError):
            runner.parse_vary(cfg, text)
    assert runner.parse_vary(cfg, "seed=1,2") == ("seed", [1, 2])


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        runner.load_config(tmp_path / "absent.ini")
