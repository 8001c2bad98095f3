"""Internal 2x2 compete/cooperate game of a contradiction's two sides.

Row player is the positive side, column player the negative side. Index 0 is
COMPETE (strengthen own side), index 1 is COOPERATE (weaken own side).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Sequence


class Choice(IntEnum):
    COMPETE = 0
    COOPERATE = 1


COMPETE, COOPERATE = Choice.COMPETE, Choice.COOPERATE
Pair = tuple  # (Choice, Choice) for (positive side, negative side)

# enumeration order of the four action pairs: ++, +-, -+, --
PAIRS: tuple = (
    (COMPETE, COMPETE),
    (COMPETE, COOPERATE),
    (COOPERATE, COMPETE),
    (COOPERATE, COOPERATE),
)


@dataclass(frozen=True)
class Game2x2:
    """Payoffs indexed ``[pos_choice][neg_choice] -> (pos_payoff, neg_payoff)``."""

    pos: tuple  # 2x2 nested tuple of floats
    neg: tuple

    def __post_init__(self):
        for name, m in (("pos", self.pos), ("neg", self.neg)):
            try:
                (a, b), (c, d) = m
            except (TypeError, ValueError):
                raise ValueError(f"{name} payoffs must be 2x2") from None
            if not all(map(math.isfinite, (a, b, c, d))):
                raise ValueError(f"{name} payoffs must be finite")

    @classmethod
    def from_cells(cls, cells: Sequence[Sequence[Sequence[float]]]) -> "Game2x2":
        """Build from ``cells[k][l] = (u_pos, u_neg)`` as laid out in a payoff table."""
        (c00, c01), (c10, c11) = cells
        pos = ((float(c00[0]), float(c01[0])), (float(c10[0]), float(c11[0])))
        neg = ((float(c00[1]), float(c01[1])), (float(c10[1]), float(c11[1])))
        return cls(pos, neg)

    @classmethod
    def common(cls, payoff: Sequence[Sequence[float]]) -> "Game2x2":
        m = tuple(tuple(float(v) for v in row) for row in payoff)
        return cls(m, m)

    def cell(self, k: int, l: int) -> tuple[float, float]:
        return self.pos[k][l], self.neg[k][l]

    def transformed(self, scale_pos=1.0, shift_pos=0.0, scale_neg=1.0, shift_neg=0.0):
        pos = tuple(tuple(scale_pos * v + shift_pos for v in row) for row in self.pos)
        neg = tuple(tuple(scale_neg * v + shift_neg for v in row) for row in self.neg)
        return Game2x2(pos, neg)


# produces a game from whatever state the scenario passes in
PayoffProvider = Callable[..., Game2x2]


@dataclass
class EquilibriumResult:
    pure: list = field(default_factory=list)
    mixed: tuple | None = None
    degenerate: bool = False

    def __post_init__(self):
        if (self.mixed is None) == (not self.pure):
            raise ValueError("mixed equilibrium is present iff there is no pure one")


def pure_nash(game: Game2x2) -> list[Pair]:
    """All cells where neither side gains by deviating alone, in PAIRS order."""
    # games are immutable, so the answer is kept on the instance
    cached = game.__dict__.get("_pure")
    if cached is None:
        P, N = game.pos, game.neg
        cached = tuple((k, l) for k, l in PAIRS
                       if P[k][l] >= P[1 - k][l] and N[k][l] >= N[k][1 - l])
        game.__dict__["_pure"] = cached
    return list(cached)


def mixed_nash(game: Game2x2, tol: float = 1e-12) -> tuple[float, float, bool]:
    """Indifference mix ``(p_pos_compete, p_neg_compete, degenerate)``.

    ``p_pos`` makes the negative side indifferent and vice versa. When the
    indifference equation has no solution in [0, 1] the uniform mix is
    returned with ``degenerate=True``.
    """
    P, N = game.pos, game.neg
    # neg side indifferent: p*N00 + (1-p)*N10 == p*N01 + (1-p)*N11
    a = (N[0][0] - N[0][1]) - (N[1][0] - N[1][1])
    b = N[1][1] - N[1][0]
    # pos side indifferent: q*P00 + (1-q)*P01 == q*P10 + (1-q)*P11
    c = (P[0][0] - P[1][0]) - (P[0][1] - P[1][1])
    d = P[1][1] - P[0][1]
    if abs(a) <= tol or abs(c) <= tol:
        return 0.5, 0.5, True
    p, q = b / a, d / c
    if not (-tol <= p <= 1 + tol and -tol <= q <= 1 + tol):
        return 0.5, 0.5, True
    return min(max(p, 0.0), 1.0), min(max(q, 0.0), 1.0), False


def equilibrium(game: Game2x2) -> EquilibriumResult:
    pure = pure_nash(game)
    if pure:
        return EquilibriumResult(pure=pure)
    p, q, degenerate = mixed_nash(game)
    return EquilibriumResult(mixed=(p, q), degenerate=degenerate)


def expected_payoffs(game: Game2x2, p: float, q: float) -> dict:
    """Expected payoff of each pure strategy against the opponent's mix."""
    P, N = game.pos, game.neg
    return {
        "pos_compete": q * P[0][0] + (1 - q) * P[0][1],
        "pos_cooperate": q * P[1][0] + (1 - q) * P[1][1],
        "neg_compete": p * N[0][0] + (1 - p) * N[1][0],
        "neg_cooperate": p * N[0][1] + (1 - p) * N[1][1],
    }


def realize_mixed(p: float, q: float, rng) -> Pair:
    """Draw one pure pair from a mixed equilibrium."""
    k = COMPETE if rng.random() < p else COOPERATE
    l = COMPETE if rng.random() < q else COOPERATE
    return k, l


def admissible_pairs(game: Game2x2, rng) -> list[Pair]:
    """Action pairs consistent with the game's equilibrium.

    Pure equilibria are returned as-is; otherwise a single pair drawn from the
    mixed equilibrium.
    """
    pure = pure_nash(game)
    if pure:
        return pure
    p, q, _ = mixed_nash(game)
    return [realize_mixed(p, q, rng)]


# Table-6 style payoffs for the ant explore/exploit contradiction.

STALE_THRESHOLD = 0.1


@dataclass(frozen=True)
class ForageModel:
    """Parameters of the pheromone-to-probability map.

    ``p_new`` is the base chance gain of finding a new source by random walk,
    ``scale`` the concentration at which a trail counts as established and
    ``steepness`` the logistic slope around the staleness threshold.
    """

    p_new: float = 0.5
    scale: float = 1.0
    steepness: float = 10.0
    stale: float = STALE_THRESHOLD


def _logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def old_source_gain(conc: float, model: ForageModel = ForageModel()) -> float:
    """Change in the chance of reaching a known source by moving onto ``conc``.

    Zero without any trail, negative on traces below the staleness threshold
    (the source is probably exhausted), approaching 1/2 on strong trails.
    """
    if conc <= 0.0:
        return 0.0
    return _logistic(model.steepness * (conc - model.stale) / model.scale) - 0.5


def forage_payoff_values(concentrations: Sequence[float],
                         model: ForageModel = ForageModel()) -> tuple:
    """``(new_random, new_follow, old_high, old_low)``: the four distinct payoffs
    of :func:`ant_forage_payoffs`."""
    # plain Python: at most a handful of neighbour cells per call
    if not concentrations:
        return 0.0, 0.0, 0.0, 0.0
    high, low = max(concentrations), min(concentrations)
    mean = sum(concentrations) / len(concentrations)
    return (model.p_new * math.exp(-mean / model.scale),
            -model.p_new * (1.0 - math.exp(-high / model.scale)),
            old_source_gain(high, model),
            old_source_gain(low, model))


def ant_forage_payoffs(concentrations: Sequence[float],
                       model: ForageModel = ForageModel()) -> Game2x2:
    """Explore (row) versus exploit (column) game from neighbour pheromone levels.

    Rows: random walk (compete) / trail following (cooperate).
    Columns: head for high (compete) / low (cooperate) concentration.
    The row payoff ignores the column and vice versa.
    """
    new_random, new_follow, old_high, old_low = forage_payoff_values(
        [float(c) for c in concentrations], model)
    return Game2x2(((new_random, new_random), (new_follow, new_follow)),
                   ((old_high, old_low), (old_high, old_low)))
