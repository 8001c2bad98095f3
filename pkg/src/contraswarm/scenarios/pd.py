"""Spatial repeated prisoner's dilemma driven by a cooperation-intention contradiction.

Each agent carries one contradiction, cooperation intention versus defection
intention, summarised by an integer intention ``I`` in ``[-I_max, I_max]``. An
agent cooperates iff ``I > 0``. After every round ``I`` moves by +/-1 from the
agent's accumulated gains and regrets and from its neighbours' intentions.

The whole population is held as arrays; a round is vectorised over agents.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..contradiction import ContradictionId
from . import ConfigError

INTENTION = ContradictionId("intention", "cooperate", "defect")

# Row player's action first; True = cooperate (refuse to confess).
PAYOFF = {
    (False, False): (1, 1),
    (False, True): (5, 0),
    (True, False): (0, 5),
    (True, True): (3, 3),
}

MOORE = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))
VON_NEUMANN = ((-1, 0), (0, -1), (0, 1), (1, 0))


@dataclass
class PdConfig:
    size: int = 100
    population: int = 1000
    rounds: int = 100
    mobility: bool = False
    intention_max: int = 10
    init_low: int = -3
    init_high: int = 3
    neighborhood: str = "moore"

    def validate(self):
        if self.population < 1 or self.population > self.size * self.size:
            raise ConfigError(
                f"population {self.population} does not fit a {self.size}x{self.size} grid")
        if self.rounds < 1:
            raise ConfigError("rounds must be at least 1")
        if self.intention_max < 1:
            raise ConfigError("intention_max must be positive")
        if not -self.intention_max <= self.init_low <= self.init_high <= self.intention_max:
            raise ConfigError("initial intention range must sit inside the clamp")
        if self.neighborhood not in ("moore", "von_neumann"):
            raise ConfigError(f"unknown neighborhood {self.neighborhood!r}")
        return self


@dataclass
class PdAgentState:
    intention: int
    gain_coop: float
    gain_defect: float
    regret_coop: float
    regret_defect: float


def pd_payoff(a_coop: bool, b_coop: bool) -> tuple[int, int]:
    return PAYOFF[(bool(a_coop), bool(b_coop))]


def intention_delta(gain_coop, regret_defect, gain_defect, regret_coop,
                    coop_neighbors, defect_neighbors):
    """+1 when cooperation looks better on the books or among neighbours, else -1.

    Works elementwise on arrays.
    """
    up = (np.asarray(gain_coop) + regret_defect > np.asarray(gain_defect) + regret_coop) | (
        np.asarray(coop_neighbors) > np.asarray(defect_neighbors))
    return np.where(up, 1, -1)


class PdPopulation:
    """Agents scattered on a toroidal grid, one agent per cell at most.

    Regret bookkeeping: ``regret_defect`` collects what defecting would have
    paid in rounds where the agent cooperated, ``regret_coop`` what
    cooperating would have paid in rounds where it defected (opponent's move
    held fixed). So ``gain_coop + regret_defect`` is everything the agent saw
    while cooperating and ``gain_defect + regret_coop`` everything seen while
    defecting.
    """

    def __init__(self, config: PdConfig, seed: int):
        self.config = config.validate()
        self.rng = np.random.default_rng(seed)
        n, size = config.population, config.size
        cells = self.rng.choice(size * size, n, replace=False)
        self.x = (cells // size).astype(np.int64)
        self.y = (cells % size).astype(np.int64)
        self.grid = np.full((size, size), -1, dtype=np.int64)
        self.grid[self.x, self.y] = np.arange(n)
        self.intention = self.rng.integers(config.init_low, config.init_high + 1, n)
        self.gain_coop = np.zeros(n)
        self.gain_defect = np.zeros(n)
        self.regret_coop = np.zeros(n)
        self.regret_defect = np.zeros(n)
        self.round = 0
        self.offsets = MOORE if config.neighborhood == "moore" else VON_NEUMANN

    @property
    def size(self) -> int:
        return self.config.population

    def agent(self, i: int) -> PdAgentState:
        return PdAgentState(int(self.intention[i]), float(self.gain_coop[i]),
                            float(self.gain_defect[i]), float(self.regret_coop[i]),
                            float(self.regret_defect[i]))

    def cooperating(self) -> np.ndarray:
        return self.intention > 0

    def cooperation_fraction(self) -> float:
        return float(np.mean(self.cooperating()))

    def sharpness(self) -> np.ndarray:
        """Intention mapped into (-1, 1) through forces ``I_max + 1 +/- I``."""
        return self.intention / (self.config.intention_max + 1.0)

    def play(self):
        """One PD game with every neighbour; updates accumulators.

        Returns per-agent counts of cooperating and defecting neighbours.
        """
        size = self.config.size
        coop = self.cooperating()
        n = self.size
        n_coop = np.zeros(n, dtype=np.int64)
        n_def = np.zeros(n, dtype=np.int64)
        for dx, dy in self.offsets:
            other = self.grid[(self.x + dx) % size, (self.y + dy) % size]
            has = other >= 0
            me = np.nonzero(has)[0]
            opp = coop[other[has]]
            mine = coop[me]
            real = np.where(mine, np.where(opp, 3, 0), np.where(opp, 5, 1))
            alt = np.where(mine, np.where(opp, 5, 1), np.where(opp, 3, 0))
            mc = np.where(mine, me, n)  # agents that cooperated; n is a discard slot
            md = np.where(mine, n, me)
            self.gain_coop += np.bincount(mc, real, n + 1)[:n]
            self.regret_defect += np.bincount(mc, alt, n + 1)[:n]
            self.gain_defect += np.bincount(md, real, n + 1)[:n]
            self.regret_coop += np.bincount(md, alt, n + 1)[:n]
            n_coop[me] += opp
            n_def[me] += ~opp
        return n_coop, n_def

    def update(self, n_coop, n_def):
        """Shift intentions of agents that met anyone this round."""
        delta = intention_delta(self.gain_coop, self.regret_defect, self.gain_defect,
                                self.regret_coop, n_coop, n_def)
        met = (n_coop + n_def) > 0
        i_max = self.config.intention_max
        self.intention = np.clip(self.intention + np.where(met, delta, 0), -i_max, i_max)

    def wander(self):
        """Each agent, in shuffled order, tries one step to a random free neighbour cell."""
        size = self.config.size
        order = self.rng.permutation(self.size)
        picks = self.rng.integers(len(self.offsets), size=self.size)
        grid, xs, ys, offs = self.grid, self.x, self.y, self.offsets
        for a in order.tolist():
            dx, dy = offs[picks[a]]
            x, y = int(xs[a]), int(ys[a])
            nx, ny = (x + dx) % size, (y + dy) % size
            if grid[nx, ny] < 0:
                grid[x, y] = -1
                grid[nx, ny] = a
                xs[a], ys[a] = nx, ny

    def step(self) -> float:
        n_coop, n_def = self.play()
        self.update(n_coop, n_def)
        if self.config.mobility:
            self.wander()
        self.round += 1
        return self.cooperation_fraction()

    def snapshot(self) -> dict:
        return {
            "round": self.round,
            "cooperation_fraction": self.cooperation_fraction(),
            "intention_histogram": np.bincount(
                self.intention + self.config.intention_max,
                minlength=2 * self.config.intention_max + 1).tolist(),
        }


def pd_round(population: PdPopulation) -> float:
    """Play one round, update intentions, optionally move; returns the cooperation fraction."""
    return population.step()


def run_pd(config: PdConfig, seed: int) -> list[float]:
    pop = PdPopulation(config, seed)
    return [pop.step() for _ in range(config.rounds)]
