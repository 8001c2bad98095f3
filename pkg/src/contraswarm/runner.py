"""Seeded runs, replicate sweeps and their CSV / JSON artefacts.

A run config is an INI file. The ``[run]`` section names the scenario and the
metrics; the section named after the scenario overrides its model defaults::

    [run]
    scenario = geese
    seed = 0
    metrics = joint_entropy, si_global, si_local, swarm_potential
    bins = 21
    snapshots = false
    snapshot_every = 100

    [geese]
    flock = 12
    steps = 2000

``steps`` (or ``rounds`` for pd) may also be given in ``[run]``; it then wins
over the scenario section.
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import io
import json
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .metrics import (assertion1_report, bin_sharpness, joint_entropy_of, si_global_of,
                      si_local, swarm_potential)
from .scenarios import ConfigError
from .scenarios.ants import NAMES as ANT_NAMES
from .scenarios.ants import AntConfig, Colony
from .scenarios.geese import NAMES as GOOSE_NAMES
from .scenarios.geese import Flock, GooseConfig
from .scenarios.pd import INTENTION, PdConfig, PdPopulation

CSV_HEADER = ("run_id", "seed", "step", "metric", "value")
SEED_LIMIT = 2 ** 64

# metrics computed from the sharpness matrix; the per-contradiction ones expand
# to ``name.<contradiction>``
PER_CONTRADICTION = ("si_local", "swarm_potential")
MATRIX_METRICS = ("si_global", "joint_entropy")


def fmt(value: float) -> str:
    """Nine significant digits, the one float format used in every artefact."""
    return "%.9g" % (value + 0.0)  # + 0.0 folds -0.0 into 0


# -- scenarios --------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    name: str
    config_type: type
    steps_field: str
    contradictions: tuple
    make: Callable  # (config, seed) -> simulation with step(), sharpness(), snapshot()
    extras: dict = field(default_factory=dict)  # metric -> fn(sim) -> float


def _mean_route_efficiency(colony: Colony) -> float:
    eff = colony.laden_efficiencies()
    return math.fsum(eff) / len(eff) if eff else math.nan


SCENARIOS = {
    "ants": Scenario("ants", AntConfig, "steps", ANT_NAMES, Colony,
                     {"mean_route_efficiency": _mean_route_efficiency}),
    "geese": Scenario("geese", GooseConfig, "steps", GOOSE_NAMES, Flock),
    "pd": Scenario("pd", PdConfig, "rounds", (INTENTION.name,), PdPopulation,
                   {"cooperation_fraction": PdPopulation.cooperation_fraction}),
}


def metric_names(scenario: Scenario) -> list[str]:
    """Every metric a scenario can emit, in emission order."""
    out = [f"{m}.{c}" for m in PER_CONTRADICTION for c in scenario.contradictions]
    return out + list(MATRIX_METRICS) + list(scenario.extras)


# -- config -----------------------------------------------------------------

@dataclass
class RunConfig:
    scenario: str
    model: object  # the scenario's config dataclass
    seed: int = 0
    metrics: tuple = ()
    bins: int = 21
    snapshots: bool = False
    snapshot_every: int = 100

    @property
    def definition(self) -> Scenario:
        return SCENARIOS[self.scenario]

    @property
    def steps(self) -> int:
        return getattr(self.model, self.definition.steps_field)

    def validate(self) -> "RunConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; "
                              f"choose from {sorted(SCENARIOS)}")
        if not 0 <= self.seed < SEED_LIMIT:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.bins < 2:
            raise ConfigError("bins must be at least 2")
        if self.snapshot_every < 1:
            raise ConfigError("snapshot_every must be positive")
        if not self.metrics:
            raise ConfigError("at least one metric is required")
        known = metric_names(self.definition)
        unknown = [m for m in self.metrics if m not in known]
        if unknown:
            raise ConfigError(f"metrics {unknown} unavailable for {self.scenario}; "
                              f"available: {known}")
        self.model.validate()
        return self

    def with_seed(self, seed: int) -> "RunConfig":
        return dataclasses.replace(self, seed=seed).validate()


def _convert(kind, raw: str, key: str):
    try:
        if kind is bool or kind == "bool":
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind is int or kind == "int":
            return int(raw)
        if kind is float or kind == "float":
            return float(raw)
        return raw.strip()
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw!r} as {getattr(kind, '__name__', kind)}") \
            from None


def _field_types(cls) -> dict:
    return {f.name: f.type for f in dataclasses.fields(cls)}


def _expand_metrics(names, scenario: Scenario) -> tuple:
    out = []
    for name in names:
        if name in PER_CONTRADICTION:
            out += [f"{name}.{c}" for c in scenario.contradictions]
        else:
            out.append(name)
    return tuple(dict.fromkeys(out))


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    if not parser.has_section("run"):
        raise ConfigError(f"{source}: missing [run] section")
    run = dict(parser["run"])
    name = run.pop("scenario", None)
    if name not in SCENARIOS:
        raise ConfigError(f"{source}: scenario must be one of {sorted(SCENARIOS)}, got {name!r}")
    scen = SCENARIOS[name]
    extra = set(parser.sections()) - {"run", name}
    if extra:
        raise ConfigError(f"{source}: sections {sorted(extra)} do not belong to scenario {name}")

    types = _field_types(scen.config_type)
    values = {}
    if parser.has_section(name):
        for key, raw in parser[name].items():
            if key not in types:
                raise ConfigError(f"{source}: unknown {name} setting {key!r}")
            values[key] = _convert(types[key], raw, f"{name}.{key}")
    for key in ("steps", "rounds"):
        if key in run:
            if key != scen.steps_field:
                raise ConfigError(f"{source}: {name} counts its length in {scen.steps_field}")
            values[key] = _convert(int, run.pop(key), f"run.{key}")
    model = scen.config_type(**values)

    metrics = run.pop("metrics", ",".join(PER_CONTRADICTION + MATRIX_METRICS))
    cfg = RunConfig(
        scenario=name,
        model=model,
        seed=_convert(int, run.pop("seed", "0"), "run.seed"),
        metrics=_expand_metrics([m.strip() for m in metrics.split(",") if m.strip()], scen),
        bins=_convert(int, run.pop("bins", "21"), "run.bins"),
        snapshots=_convert(bool, run.pop("snapshots", "false"), "run.snapshots"),
        snapshot_every=_convert(int, run.pop("snapshot_every", "100"), "run.snapshot_every"),
    )
    if run:
        raise ConfigError(f"{source}: unknown run settings {sorted(run)}")
    if hasattr(model, "bins"):
        model.bins = cfg.bins
    return cfg.validate()


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text, str(path))


def override(cfg: RunConfig, param: str, value) -> RunConfig:
    """Copy of ``cfg`` with one setting replaced; ``param`` is ``key`` or ``section.key``."""
    section, _, key = param.rpartition(".")
    model_fields = _field_types(cfg.definition.config_type)
    if section in ("", cfg.scenario) and key in model_fields:
        model = dataclasses.replace(cfg.model, **{key: value})
        return dataclasses.replace(cfg, model=model).validate()
    run_fields = {"seed": int, "bins": int, "snapshots": bool, "snapshot_every": int}
    if section in ("", "run") and key in run_fields:
        changed = dataclasses.replace(cfg, **{key: value})
        if key == "bins" and hasattr(cfg.model, "bins"):
            changed.model = dataclasses.replace(cfg.model, bins=value)
        return changed.validate()
    raise ConfigError(f"no setting {param!r} for scenario {cfg.scenario}")


def parse_vary(cfg: RunConfig, text: str) -> tuple[str, list]:
    """``"pd.population=1000,3000"`` -> ``("pd.population", [1000, 3000])`` typed like the field."""
    param, sep, raw = text.partition("=")
    param = param.strip()
    if not sep or not param or not raw.strip():
        raise ConfigError(f"--vary wants param=v1,v2,... got {text!r}")
    section, _, key = param.rpartition(".")
    types = _field_types(cfg.definition.config_type)
    run_types = {"seed": "int", "bins": "int", "snapshots": "bool", "snapshot_every": "int"}
    if section in ("", cfg.scenario) and key in types:
        kind = types[key]
    elif section in ("", "run") and key in run_types:
        kind = run_types[key]
    else:
        raise ConfigError(f"no setting {param!r} for scenario {cfg.scenario}")
    values = [_convert(kind, v, param) for v in raw.split(",") if v.strip()]
    for v in values:
        override(cfg, param, v)  # fail early on values the model rejects
    return param, values


# -- running ----------------------------------------------------------------

@dataclass
class RunResult:
    run_id: str
    seed: int
    metrics: tuple
    series: dict  # metric -> list of values, one per step (steps 1..T)
    distributions: list  # binned first-contradiction sharpness per step
    snapshots: list

    @property
    def steps(self) -> int:
        return len(self.distributions)


def _measure(cfg: RunConfig, sim, matrix: np.ndarray) -> dict:
    scen, b = cfg.definition, cfg.bins
    out = {}
    dists = {}
    for metric in cfg.metrics:
        head, _, contradiction = metric.partition(".")
        if head in PER_CONTRADICTION:
            col = scen.contradictions.index(contradiction)
            if col not in dists:
                dists[col] = bin_sharpness(matrix[:, col], b)
            d = dists[col]
            out[metric] = si_local(d) if head == "si_local" else swarm_potential(d)
        elif metric == "si_global":
            out[metric] = si_global_of(matrix, b)
        elif metric == "joint_entropy":
            out[metric] = joint_entropy_of(matrix, b)
        else:
            out[metric] = float(scen.extras[metric](sim))
    return out


def simulate(cfg: RunConfig, run_id: str | None = None, progress=None) -> RunResult:
    """Run one seeded simulation and collect its per-step metrics in memory."""
    cfg.validate()
    scen = cfg.definition
    run_id = run_id or f"{scen.name}-s{cfg.seed}"
    sim = scen.make(cfg.model, cfg.seed)
    series = {m: [] for m in cfg.metrics}
    dists, snaps = [], []
    for step in range(1, cfg.steps + 1):
        sim.step()
        matrix = np.asarray(sim.sharpness(), dtype=float).reshape(-1, len(scen.contradictions))
        for metric, value in _measure(cfg, sim, matrix).items():
            series[metric].append(value)
        dists.append(bin_sharpness(matrix[:, 0], cfg.bins))
        if cfg.snapshots and step % cfg.snapshot_every == 0:
            snaps.append(sim.snapshot())
        if progress is not None:
            progress(step)
    return RunResult(run_id, cfg.seed, cfg.metrics, series, dists, snaps)


def _rows(result: RunResult):
    for step in range(result.steps):
        for metric in result.metrics:
            yield (result.run_id, str(result.seed), str(step + 1), metric,
                   fmt(result.series[metric][step]))


def write_csv(path: Path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")


def _clean(value: float):
    # JSON has no NaN; round through the shared format for byte-stable output
    return None if math.isnan(value) else float(fmt(value))


def _stats(values: list) -> dict:
    finite = [v for v in values if not math.isnan(v)]
    return {
        "first": _clean(values[0]),
        "last": _clean(values[-1]),
        "min": _clean(min(finite)) if finite else None,
        "max": _clean(max(finite)) if finite else None,
    }


def summarize(result: RunResult, cfg: RunConfig) -> dict:
    report = assertion1_report(result.distributions) if result.steps >= 2 else None
    return {
        "run_id": result.run_id,
        "scenario": cfg.scenario,
        "seed": result.seed,
        "steps": result.steps,
        "bins": cfg.bins,
        "metrics": {m: _stats(result.series[m]) for m in result.metrics},
        "assertion1": report.as_dict() if report else {"verdict": "SKIPPED"},
        "model": dataclasses.asdict(cfg.model),
    }


def write_json(path: Path, data):
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8",
                    newline="")


def _prepare(out) -> Path:
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("", encoding="utf-8")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc.strerror or exc}") from None
    return out


def run(cfg: RunConfig, out) -> RunResult:
    """Write ``metrics.csv``, ``summary.json`` and, if enabled, ``snapshots.jsonl``."""
    out = _prepare(out)
    result = simulate(cfg)
    write_csv(out / "metrics.csv", CSV_HEADER, _rows(result))
    write_json(out / "summary.json", summarize(result, cfg))
    if cfg.snapshots:
        lines = "".join(json.dumps(s, sort_keys=True) + "\n" for s in result.snapshots)
        (out / "snapshots.jsonl").write_text(lines, encoding="utf-8", newline="")
    return result


# -- sweeps -----------------------------------------------------------------

def _label(param: str, value) -> str:
    key = param.rpartition(".")[2]
    if isinstance(value, bool):
        value = "on" if value else "off"
    return f"{key}={value}"


def median_series(results: list, metrics) -> dict:
    """Step-wise median across runs; NaN entries are ignored, all-NaN gives NaN."""
    out = {}
    for metric in metrics:
        rows = zip(*(r.series[metric] for r in results))
        meds = []
        for vals in rows:
            finite = [v for v in vals if not math.isnan(v)]
            meds.append(statistics.median(finite) if finite else math.nan)
        out[metric] = meds
    return out


def sweep(cfg: RunConfig, param: str, values: list, replicates: int, out) -> dict:
    """``replicates`` seeded runs per value (seeds ``base + r``) plus median series.

    Writes ``metrics.csv`` (every run), ``medians.csv`` (one series per value)
    and ``summary.json`` (final-step medians side by side).
    """
    if replicates < 1:
        raise ConfigError("replicates must be at least 1")
    if not values:
        raise ConfigError("nothing to sweep")
    out = _prepare(out)
    records, median_rows, finals = [], [], {}
    for value in values:
        label = _label(param, value)
        base = override(cfg, param, value)
        results = []
        for r in range(replicates):
            seed = base.seed + r
            if seed >= SEED_LIMIT:
                raise ConfigError("base seed plus replicate index overflows 64 bits")
            res = simulate(base.with_seed(seed), run_id=f"{label}-r{r}")
            results.append(res)
            records.extend(_rows(res))
        meds = median_series(results, base.metrics)
        for step in range(len(next(iter(meds.values())))):
            for metric in base.metrics:
                median_rows.append((label, str(step + 1), metric, fmt(meds[metric][step])))
        finals[label] = {m: _clean(meds[m][-1]) for m in base.metrics}
    write_csv(out / "metrics.csv", CSV_HEADER, records)
    write_csv(out / "medians.csv", ("series", "step", "metric", "value"), median_rows)
    summary = {
        "scenario": cfg.scenario,
        "vary": param,
        "values": [_label(param, v) for v in values],
        "replicates": replicates,
        "base_seed": cfg.seed,
        "final_medians": finals,
    }
    write_json(out / "summary.json", summary)
    return summary


# -- reading back -----------------------------------------------------------

def read_series(path) -> dict:
    """``{metric: {series id: [(step, value), ...]}}`` from a metrics or medians CSV."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        # the series id is the first column in both layouts
        if header == list(CSV_HEADER):
            step_at, metric_at, value_at = 2, 3, 4
        elif header == ["series", "step", "metric", "value"]:
            step_at, metric_at, value_at = 1, 2, 3
        else:
            raise ValueError(f"{path}: not a metrics or medians CSV (header {header})")
        out: dict = {}
        for n, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValueError(f"{path}:{n}: expected {len(header)} fields")
            series = out.setdefault(row[metric_at], {}).setdefault(row[0], [])
            series.append((int(row[step_at]), float(row[value_at])))
    return out
