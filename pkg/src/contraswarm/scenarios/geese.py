"""Migrating geese: followers keep station behind the bird ahead.

Two contradictions per goose:

* ``c1`` safety (positive) vs effort saving (negative). Sharpness is the
  follow-gap error ``(gap - g*) / (g_max - g_min)``: positive when hanging
  back (safe but costly), negative when tailgating.
* ``c2`` keeping apart (positive) vs closing in (negative). Sharpness is the
  lateral-offset error ``(|dy| - s*) / (s_max - s_min)`` relative to the
  bird ahead.

Both values are clamped to +/-0.999. The frontmost goose leads at constant
speed and is exempt from adjustment; its sharpness is reported as 0.
"""

from __future__ import annotations

import copy
import random
from dataclasses import dataclass

import numpy as np

from ..behavior import (
    InteractionContext,
    PotentialPolicy,
    apply_behavior,
    select_with_potential,
)
from ..contradiction import (
    FORCE_FLOOR,
    ContradictionId,
    ContradictionState,
    ImportanceOrder,
    Individual,
)
from ..game import COMPETE, COOPERATE, PAIRS, Game2x2
from . import ConfigError

C1 = ContradictionId("c1", "safety", "effort")
C2 = ContradictionId("c2", "apart", "close")
NAMES = ("c1", "c2")
CLAMP = 0.999


# per action pair, PAIRS order
_DRIFT = np.array([0.0, 1.0, -1.0, 0.0])  # direction of the sharpness change
_EFFORT = np.array([0.0, 1.0, 1.0, 0.0])  # pairs that actually change course
_POS_SIGN = np.array([1.0, 1.0, -1.0, -1.0])
_NEG_SIGN = np.array([1.0, -1.0, 1.0, -1.0])
_ROW_SWITCH = np.array([2, 3, 0, 1])  # same cell with the positive side's choice flipped
_COL_SWITCH = np.array([1, 0, 3, 2])
_BIT = np.array([1, 2, 4, 8])
# surviving pair masks (as bit codes) of both contradictions -> behaviours in
# the order the engine enumerates them
_OPTIONS = [[[(p, q) for p in range(4) if a >> p & 1 for q in range(4) if b >> q & 1]
             for b in range(16)] for a in range(16)]


@dataclass
class GooseConfig:
    flock: int = 12
    ideal_gap: float = 4.0
    gap_min: float = 2.0
    gap_max: float = 8.0
    lateral_ideal: float = 2.0
    lateral_min: float = 1.0
    lateral_max: float = 5.0
    leader_speed: float = 1.0
    speed_min: float = 0.5
    speed_max: float = 1.5
    lateral_speed: float = 0.5
    gain: float = 0.02
    deadband: float = 0.02
    steps: int = 2000
    spawn_length: float = 80.0
    spawn_width: float = 30.0
    neighbor_radius: float = 10.0
    theta: float = 0.8
    bins: int = 21
    engine: bool = False  # route every decision through the generic engine (slow)

    def validate(self):
        if not 10 <= self.flock <= 20:
            raise ConfigError(f"flock size {self.flock} outside [10, 20]")
        if not 0 < self.gap_min < self.ideal_gap < self.gap_max:
            raise ConfigError("need 0 < gap_min < ideal_gap < gap_max")
        if not 0 < self.lateral_min < self.lateral_ideal < self.lateral_max:
            raise ConfigError("need 0 < lateral_min < lateral_ideal < lateral_max")
        if not 0 < self.speed_min <= self.leader_speed <= self.speed_max:
            raise ConfigError("leader speed must sit inside the speed limits")
        if not 0 < self.gain < 1:
            raise ConfigError("gain must lie in (0, 1)")
        if self.steps < 1:
            raise ConfigError("steps must be at least 1")
        return self


def _bound(x, lo, hi):
    # np.clip carries heavy dispatch overhead on arrays this small
    return np.minimum(np.maximum(x, lo), hi)


def _clamp(v: float) -> float:
    return min(max(v, -CLAMP), CLAMP)


def gap_sharpness(gap: float, cfg: GooseConfig) -> float:
    return _clamp((gap - cfg.ideal_gap) / (cfg.gap_max - cfg.gap_min))


def lateral_sharpness(offset: float, cfg: GooseConfig) -> float:
    return _clamp((abs(offset) - cfg.lateral_ideal) / (cfg.lateral_max - cfg.lateral_min))


def next_sharpness(lam: float, pair, gain: float) -> float:
    """Sharpness one step after ``pair`` under the proportional station-keeping law.

    (cooperate, compete) pushes sharpness down by ``gain*|lam|``, (compete,
    cooperate) pushes it up; the two balanced pairs leave it alone.
    """
    if pair == (COOPERATE, COMPETE):
        return lam - gain * abs(lam)
    if pair == (COMPETE, COOPERATE):
        return lam + gain * abs(lam)
    return lam


def station_game(lam: float, gain: float, effort: float) -> Game2x2:
    """Common-interest game of two sides that both want the contradiction balanced.

    Payoff is ``-|next sharpness|``, less ``effort`` when the pair actually
    changes speed or heading. Corrections pay off only once ``|lam|`` exceeds
    ``effort / gain``.
    """
    cells = {}
    for k, l in PAIRS:
        cost = effort if k != l else 0.0
        cells[k, l] = -abs(next_sharpness(lam, (k, l), gain)) - cost
    m = ((cells[0, 0], cells[0, 1]), (cells[1, 0], cells[1, 1]))
    return Game2x2(m, m)


def goose_utility(individual: Individual, behavior) -> float:
    """One minus the mean predicted imbalance of both contradictions."""
    gain = individual.properties["gain"]
    lams = individual.properties["lambda"]
    total = 0.0
    for lam, pair in zip(lams, behavior):
        total += abs(next_sharpness(lam, pair, gain))
    return 1.0 - total / len(lams)


class Flock:
    def __init__(self, config: GooseConfig, seed: int):
        self.config = cfg = config.validate()
        init = np.random.default_rng(seed)
        self.rng = random.Random(seed)
        n = cfg.flock
        self.x = init.uniform(0.0, cfg.spawn_length, n)
        self.y = init.uniform(-cfg.spawn_width / 2, cfg.spawn_width / 2, n)
        self.v = init.uniform(cfg.speed_min, cfg.speed_max, n)
        self.step_index = 0
        self.policy = PotentialPolicy(theta=cfg.theta, bin_count=cfg.bins)
        self.geese = [
            Individual(
                id=i,
                contradictions=(ContradictionState(C1, 0.5, 0.5), ContradictionState(C2, 0.5, 0.5)),
                order=ImportanceOrder([("c1", "c2")]),
                properties={"gain": cfg.gain, "lambda": (0.0, 0.0)},
                utility=goose_utility,
            )
            for i in range(n)
        ]
        self.lam = np.zeros((n, 2))
        self._self_mask = np.eye(n, dtype=bool)
        self._onehot = np.eye(cfg.bins)
        self._mid = -1.0 + (np.arange(cfg.bins) + 0.5) * (2.0 / cfg.bins)
        c = np.arange(n + 1.0)
        self._c_log_c = c * np.log(np.maximum(c, 1.0))
        self._observe()

    # -- observation
    def _observe(self):
        cfg = self.config
        order = np.argsort(-self.x, kind="stable")
        self.order = order
        self.leader = int(order[0])
        self.ahead = np.full(cfg.flock, -1)
        self.ahead[order[1:]] = order[:-1]
        lam = np.zeros((cfg.flock, 2))
        f, a = order[1:], order[:-1]
        gap = (self.x[a] - self.x[f] - cfg.ideal_gap) / (cfg.gap_max - cfg.gap_min)
        off = (np.abs(self.y[f] - self.y[a]) - cfg.lateral_ideal) / (
            cfg.lateral_max - cfg.lateral_min)
        lam[f, 0] = _bound(gap, -CLAMP, CLAMP)
        lam[f, 1] = _bound(off, -CLAMP, CLAMP)
        self.lam = lam

    def sharpness(self) -> np.ndarray:
        return self.lam.copy()

    def individual(self, i: int) -> Individual:
        """Goose ``i`` as an engine individual, forces matching its observed sharpness."""
        g = copy.copy(self.geese[i])
        l1, l2 = float(self.lam[i, 0]), float(self.lam[i, 1])
        g.contradictions = (ContradictionState.from_sharpness(C1, l1),
                            ContradictionState.from_sharpness(C2, l2))
        g.properties = {"gain": self.config.gain, "lambda": (l1, l2)}
        return g

    def _contexts(self, i: int, near: np.ndarray, dist: np.ndarray):
        if near.size == 0:
            return []
        members = (i,) + tuple(int(j) for j in near)
        crowd = float(np.sum(dist[near] < self.config.gap_min)) / near.size
        return [
            InteractionContext(i, name, members, frozenset({"airspace"}),
                               tuple(float(self.lam[j, k]) for j in members), scarcity=crowd)
            for k, name in enumerate(NAMES)
        ]

    # -- dynamics
    def step(self) -> np.ndarray:
        """Advance one tick; returns the sharpness matrix observed at its start."""
        cfg = self.config
        observed = self.lam.copy()
        dist = np.hypot(self.x[:, None] - self.x[None, :], self.y[:, None] - self.y[None, :])
        np.fill_diagonal(dist, np.inf)
        followers = self.order[1:].tolist()
        if cfg.engine:
            lam_new = self._decide_engine(followers, dist)
        else:
            lam_new = self._decide_vectorised(followers, dist)
        self._move(followers, lam_new)
        self.step_index += 1
        self._observe()
        return observed

    def _magnitudes(self) -> np.ndarray:
        return np.maximum(self.config.gain * np.abs(self.lam) / 2, 1e-9)

    def _decide_engine(self, followers, dist) -> np.ndarray:
        """Reference path: one call into the generic selection engine per goose."""
        cfg = self.config
        effort = cfg.gain * cfg.deadband
        mags = self._magnitudes()
        chosen = {}
        for i in followers:
            g = self.individual(i)
            l1, l2 = g.properties["lambda"]
            games = {"c1": station_game(l1, cfg.gain, effort),
                     "c2": station_game(l2, cfg.gain, effort)}
            near = np.nonzero(dist[i] <= cfg.neighbor_radius)[0]
            m = {"c1": float(mags[i, 0]), "c2": float(mags[i, 1])}

            def magnitude(name, _kind, m=m):
                return m[name]

            behavior = select_with_potential(g, games, None, self._contexts(i, near, dist[i]),
                                             self.policy, self.rng, magnitude=magnitude)
            chosen[i] = (g, behavior, magnitude)
        lam_new = self.lam.copy()
        for i, (g, behavior, magnitude) in chosen.items():
            moved = apply_behavior(g, behavior, magnitude)
            self.geese[i] = moved
            lam_new[i] = moved.sharpness_vector()
        return lam_new

    def _decide_vectorised(self, followers, dist) -> np.ndarray:
        """Same lexicographic choice as the engine, evaluated for the whole flock at once.

        Both contradictions are scored separately (utility and potential are
        sums over contradictions), so the surviving behaviours are the product
        of per-contradiction survivors; remaining ties are broken with the
        same random stream and in the same order as the engine does.
        """
        cfg = self.config
        gain = cfg.gain
        lam = self.lam
        la = lam[..., None]
        # next sharpness of the four pairs, PAIRS order: hold, up, down, hold
        nxt = la + gain * np.abs(la) * _DRIFT
        imbalance = np.abs(nxt)
        u = -imbalance - cfg.gain * cfg.deadband * _EFFORT
        # pure equilibria of the common-interest game: no side gains by switching alone
        ok = (u >= u[..., _ROW_SWITCH]) & (u >= u[..., _COL_SWITCH])
        # utility key: smallest predicted imbalance among equilibria
        util = np.where(ok, -imbalance, -np.inf)
        keep = ok & (util >= util.max(axis=-1, keepdims=True) - 1e-12)

        # predicted force-based sharpness after each pair
        # |lam| <= CLAMP keeps both starting forces far above the floor
        m = np.maximum(gain * np.abs(la) / 2, 1e-9)
        p2 = np.maximum((1.0 + la) / 2.0 + _POS_SIGN * m, FORCE_FLOOR)
        n2 = np.maximum((1.0 - la) / 2.0 + _NEG_SIGN * m, FORCE_FLOOR)
        share = p2 / (p2 + n2)
        pred = share - (1.0 - share)

        # crowd summaries: neighbours within radius plus the goose itself
        n, bins = cfg.flock, cfg.bins
        near = dist <= cfg.neighbor_radius
        n_near = near.sum(axis=1)
        has = n_near > 0
        members = (near | self._self_mask).astype(float)
        crowd = (near & (dist < cfg.gap_min)).sum(axis=1) / np.maximum(n_near, 1)
        target = np.where(crowd >= cfg.theta, self.policy.deviate_target,
                          self.policy.conform_target)[:, None, None]
        idx = np.minimum(np.floor((lam + 1.0) * (bins / 2.0)).astype(np.int64), bins - 1)
        counts = (members @ self._onehot[idx].reshape(n, 2 * bins)).reshape(n, 2, bins)
        size = members.sum(axis=1)[:, None]
        mean = (counts @ self._mid) / size
        # entropy from integer counts: ln m - sum(c ln c) / m
        h = np.log(size) - self._c_log_c[counts.astype(np.int64)].sum(axis=-1) / size
        pot = np.where(mean == 0.0, 0.0, _bound(mean / np.maximum(h, 1e-9), -1.0, 1.0))
        e = mean[..., None]
        denom = np.abs(e) + np.abs(pred)
        con = np.abs(e - pred) / np.where(denom > 0, denom, 1.0)  # 0/0 -> 0
        rp = np.minimum(con / np.maximum(np.abs(pot), 1e-9)[..., None], 1.0)
        score = -np.abs(rp - target)

        # potential key, only where utility left more than one behaviour
        tied = (keep.sum(axis=-1).prod(axis=-1) > 1) & has
        best = np.where(keep, score, -np.inf).max(axis=-1, keepdims=True)
        keep = np.where(tied[:, None, None], keep & (score >= best - 1e-12), keep)

        codes = (keep @ _BIT).tolist()
        draw = self.rng.randrange
        picks = []
        for i in followers:
            c1, c2 = codes[i]
            options = _OPTIONS[c1][c2]
            picks.append(options[draw(len(options))] if len(options) > 1 else options[0])
        f = np.asarray(followers, dtype=np.int64)
        j = np.asarray(picks, dtype=np.int64)
        lam_new = lam.copy()
        lam_new[f, 0] = pred[f, 0, j[:, 0]]
        lam_new[f, 1] = pred[f, 1, j[:, 1]]
        return lam_new

    def _move(self, followers, lam_new):
        """Pick each follower's speed and sideways step so that gap and lateral
        offset head for the values its new sharpness encodes."""
        cfg = self.config
        f = np.asarray(followers, dtype=np.int64)
        a = self.ahead[f]
        gap = self.x[a] - self.x[f]
        offset = self.y[f] - self.y[a]
        target_gap = cfg.ideal_gap + lam_new[f, 0] * (cfg.gap_max - cfg.gap_min)
        v = _bound(self.v[a] + (gap - target_gap), cfg.speed_min, cfg.speed_max)
        target_off = cfg.lateral_ideal + lam_new[f, 1] * (cfg.lateral_max - cfg.lateral_min)
        side = np.where(offset != 0, np.sign(offset), np.where(f % 2 == 1, 1.0, -1.0))
        dy = _bound(side * (target_off - np.abs(offset)), -cfg.lateral_speed, cfg.lateral_speed)
        self.v[f] = v
        self.y[f] += dy
        self.v[self.leader] = cfg.leader_speed
        self.x += self.v

    def snapshot(self) -> dict:
        return {
            "step": self.step_index,
            "leader": self.leader,
            "x": [round(float(v), 6) for v in self.x],
            "y": [round(float(v), 6) for v in self.y],
            "speed": [round(float(v), 6) for v in self.v],
        }


def geese_step(flock: Flock) -> np.ndarray:
    return flock.step()
