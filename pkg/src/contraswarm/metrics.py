"""Swarm-level measurements over sharpness values.

Sharpness lives in (-1, 1). Distributions are built by quantising it into
``B`` uniform bins; all logs are natural.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_BINS = 21
ENTROPY_FLOOR = 1e-9
POTENTIAL_FLOOR = 1e-9


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class SharpnessSample:
    agent: object
    contradiction: str
    value: float

    def __post_init__(self):
        if not abs(self.value) < 1.0:
            raise MetricError(f"sharpness {self.value} outside (-1, 1)")


@dataclass
class SwarmSnapshot:
    step: int
    samples: list = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for s in self.samples:
            key = (s.agent, s.contradiction)
            if key in seen:
                raise MetricError(f"duplicate sample for {key}")
            seen.add(key)

    @classmethod
    def from_matrix(cls, step: int, agents: Sequence, names: Sequence[str], values):
        """``values[i][j]`` is agent i's sharpness on contradiction j."""
        values = np.asarray(values, dtype=float)
        samples = [
            SharpnessSample(a, n, float(values[i, j]))
            for i, a in enumerate(agents) for j, n in enumerate(names)
        ]
        return cls(step, samples)

    def values(self, contradiction: str) -> np.ndarray:
        return np.array([s.value for s in self.samples if s.contradiction == contradiction])

    def matrix(self, contradictions: Sequence[str]) -> np.ndarray:
        """Agents x contradictions array; every agent must cover every name."""
        by_agent: dict = {}
        for s in self.samples:
            by_agent.setdefault(s.agent, {})[s.contradiction] = s.value
        rows = []
        for agent, vals in by_agent.items():
            missing = [c for c in contradictions if c not in vals]
            if missing:
                raise MetricError(f"agent {agent!r} has no sample for {missing}")
            rows.append([vals[c] for c in contradictions])
        if not rows:
            raise MetricError("snapshot has no samples")
        return np.array(rows, dtype=float)


@dataclass(frozen=True)
class BinnedDistribution:
    """Empirical distribution over occupied bins of a uniform grid on [-1, 1]."""

    bin_count: int
    bins: tuple  # occupied bin indices, ascending
    probs: tuple  # matching probabilities, all > 0
    sample_count: int

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.bin_count + 1)

    @property
    def midpoints(self) -> np.ndarray:
        w = 2.0 / self.bin_count
        return -1.0 + (np.asarray(self.bins, dtype=float) + 0.5) * w

    @classmethod
    def from_counts(cls, bin_count: int, counts: dict) -> "BinnedDistribution":
        items = sorted((int(k), int(v)) for k, v in counts.items() if v > 0)
        m = sum(v for _, v in items)
        return cls(bin_count, tuple(k for k, _ in items), tuple(v / m for _, v in items), m)


def bin_index(values, bin_count: int) -> np.ndarray:
    """Bin of each value; a value exactly on an interior edge goes up."""
    v = np.asarray(values, dtype=float)
    idx = np.floor((v + 1.0) * (bin_count / 2.0)).astype(np.int64)
    return np.minimum(np.maximum(idx, 0), bin_count - 1)  # np.clip is slow on small arrays


def bin_sharpness(values, bin_count: int = DEFAULT_BINS) -> BinnedDistribution:
    # plain Python: samples are usually a handful of neighbours
    v = np.ravel(values).tolist() if isinstance(values, np.ndarray) else list(values)
    if not v:
        raise MetricError("cannot bin an empty sample")
    if bin_count < 2:
        raise MetricError("need at least two bins")
    half = bin_count / 2.0
    counts: dict = {}
    for x in v:
        x = float(x)
        if not -1.0 < x < 1.0:
            raise MetricError("sharpness values must lie strictly inside (-1, 1)")
        i = min(int(math.floor((x + 1.0) * half)), bin_count - 1)
        counts[i] = counts.get(i, 0) + 1
    m = len(v)
    idx = sorted(counts)
    return BinnedDistribution(bin_count, tuple(idx), tuple(counts[i] / m for i in idx), m)


def expectation(dist: BinnedDistribution) -> float:
    w = 2.0 / dist.bin_count
    return math.fsum((-1.0 + (b + 0.5) * w) * p for b, p in zip(dist.bins, dist.probs))


def entropy_of(probs) -> float:
    # 0.0 - x rather than -x: a single occupied bin gives +0.0, not -0.0
    return 0.0 - math.fsum(p * math.log(p) for p in np.ravel(probs).tolist() if p > 0)


def entropy(dist: BinnedDistribution) -> float:
    return entropy_of(dist.probs)


def swarm_potential(dist: BinnedDistribution) -> float:
    """Mean sharpness over entropy, clamped to [-1, 1].

    A single occupied bin has zero entropy; the floor plus clamp send the
    potential to +/-1 there.
    """
    e = expectation(dist)
    if e == 0.0:
        return 0.0
    h = max(entropy(dist), ENTROPY_FLOOR)
    return min(max(e / h, -1.0), 1.0)


def contrast(agent_lambda: float, mean: float) -> float:
    denom = abs(mean) + abs(agent_lambda)
    if denom == 0.0:
        return 0.0
    return abs(mean - agent_lambda) / denom


def relative_potential(agent_lambda: float, dist: BinnedDistribution) -> float:
    """How strongly the crowd described by ``dist`` bears on one agent, in [0, 1]."""
    return relative_potential_from(agent_lambda, expectation(dist), swarm_potential(dist))


def relative_potential_from(agent_lambda: float, mean: float, potential: float) -> float:
    """Same as :func:`relative_potential` given the crowd's mean and potential."""
    c = contrast(agent_lambda, mean)
    if c == 0.0:
        return 0.0
    return min(c / max(abs(potential), POTENTIAL_FLOOR), 1.0)


def si_local(dist: BinnedDistribution) -> float:
    m = dist.sample_count
    if m < 2:
        raise MetricError("order needs at least two agents")
    ln_m = math.log(m)
    return min(max((ln_m - entropy(dist)) / ln_m, 0.0), 1.0)


def joint_entropy_of(matrix, bin_count: int = DEFAULT_BINS) -> float:
    """Entropy of the empirical joint distribution of per-dimension bin tuples."""
    x = np.asarray(matrix, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise MetricError("expected a non-empty agents x contradictions matrix")
    counts = Counter(map(tuple, bin_index(x, bin_count).tolist()))
    m = x.shape[0]
    return entropy_of([c / m for c in counts.values()])


def joint_entropy(snapshot: SwarmSnapshot, contradictions: Sequence[str],
                  bin_count: int = DEFAULT_BINS) -> float:
    return joint_entropy_of(snapshot.matrix(contradictions), bin_count)


def si_global_of(matrix, bin_count: int = DEFAULT_BINS) -> float:
    x = np.asarray(matrix, dtype=float)
    m, n = x.shape
    if m < 2 or n < 1:
        raise MetricError("global order needs at least two agents and one contradiction")
    norm = n * math.log(m)
    return min(max((norm - joint_entropy_of(x, bin_count)) / norm, 0.0), 1.0)


def si_global(snapshot: SwarmSnapshot, contradictions: Sequence[str],
              bin_count: int = DEFAULT_BINS) -> float:
    return si_global_of(snapshot.matrix(contradictions), bin_count)


@dataclass
class PairVerdict:
    index: int
    d_potential: float
    d_si: float
    ratio: float | None
    ok: bool


@dataclass
class Assertion1Report:
    pairs: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (index, reason)

    @property
    def passed(self) -> bool:
        return all(p.ok for p in self.pairs)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "checked_pairs": len(self.pairs),
            "failed_pairs": sum(not p.ok for p in self.pairs),
            "skipped_pairs": len(self.skipped),
        }


def assertion1_report(series: Iterable[BinnedDistribution],
                      tol: float = 1e-6) -> Assertion1Report:
    """Check that |potential| and order move together between consecutive
    distributions whose mean sharpness is unchanged."""
    dists = list(series)
    if len(dists) < 2:
        raise MetricError("need at least two distributions")
    report = Assertion1Report()
    for i in range(len(dists) - 1):
        a, b = dists[i], dists[i + 1]
        ea, eb = expectation(a), expectation(b)
        if abs(ea - eb) > tol:
            report.skipped.append((i, f"mean sharpness moved {ea:.6g} -> {eb:.6g}"))
            continue
        if a.sample_count != b.sample_count or a.sample_count < 2:
            report.skipped.append((i, "agent count differs or is below two"))
            continue
        dp = abs(swarm_potential(b)) - abs(swarm_potential(a))
        ds = si_local(b) - si_local(a)
        if dp == 0.0 and ds == 0.0:
            report.pairs.append(PairVerdict(i, dp, ds, None, True))
        elif ds == 0.0:
            report.pairs.append(PairVerdict(i, dp, ds, None, False))
        else:
            ratio = dp / ds
            report.pairs.append(PairVerdict(i, dp, ds, ratio, ratio > 0))
    return report
