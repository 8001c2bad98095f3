"""Behaviour space and constrained behaviour selection.

A behaviour assigns one (positive-side, negative-side) action pair to every
contradiction of an individual. Selection is lexicographic: the equilibrium
filter is hard, then utility, then claimed-resource fraction, then alignment
with the crowd's relative potential.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .contradiction import (
    FORCE_FLOOR,
    ActionKind,
    ContradictionState,
    Individual,
    shifted,
    sharpness,
)
from .game import COMPETE, PAIRS, Game2x2, admissible_pairs
from .metrics import (BinnedDistribution, bin_sharpness, expectation, relative_potential_from,
                      swarm_potential)

log = logging.getLogger(__name__)

N_MAX = 8
DEFAULT_THETA = 0.8
_EPS = 1e-12


class BehaviorSpaceTooLarge(ValueError):
    pass


Behavior = tuple  # one (Choice, Choice) pair per contradiction, in the individual's order


def pair_actions(pair) -> tuple[ActionKind, ActionKind]:
    """Force actions behind an action pair: each side strengthens itself when it
    competes and weakens itself when it cooperates."""
    k, l = pair
    pos = ActionKind.STRENGTHEN_POS if k == COMPETE else ActionKind.WEAKEN_POS
    neg = ActionKind.STRENGTHEN_NEG if l == COMPETE else ActionKind.WEAKEN_NEG
    return pos, neg


_PAIR_ACTIONS = {pair: pair_actions(pair) for pair in PAIRS}


def enumerate_behaviors(individual: Individual, n_max: int = N_MAX) -> list[Behavior]:
    n = len(individual.contradictions)
    if n > n_max:
        raise BehaviorSpaceTooLarge(
            f"{n} contradictions give 4^{n} behaviours (cap {n_max}); "
            "select per contradiction instead"
        )
    return list(itertools.product(PAIRS, repeat=n))


@dataclass(frozen=True)
class ResourceClaim:
    kind: str
    quantity: float
    maximum: float

    @property
    def feasible(self) -> bool:
        return 0.0 <= self.quantity <= self.maximum

    @property
    def fraction(self) -> float:
        return self.quantity / self.maximum if self.maximum > 0 else 0.0


@dataclass
class InteractionContext:
    """One interaction seen from its centre agent.

    ``neighbor_sharpness`` holds the focal contradiction's sharpness for every
    participant (the centre included); ``scarcity`` is the contested share of
    the resources in ``resources``.
    """

    center: object
    contradiction: str
    participants: tuple
    resources: frozenset = frozenset()
    neighbor_sharpness: tuple = ()
    scarcity: float = 0.0
    weight: float = 1.0

    def __post_init__(self):
        if self.center not in self.participants:
            raise ValueError("centre agent must take part in its own interaction")

    def distribution(self, bin_count: int) -> BinnedDistribution | None:
        if not self.neighbor_sharpness:
            return None
        return bin_sharpness(self.neighbor_sharpness, bin_count)


@dataclass(frozen=True)
class PotentialPolicy:
    theta: float = DEFAULT_THETA
    conform_target: float = 0.0
    deviate_target: float = 1.0
    bin_count: int = 21

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0, 1)")


@dataclass
class Selection:
    behavior: Behavior
    admissible: list
    diagnostics: list = field(default_factory=list)


# --- helpers ---------------------------------------------------------------

Magnitude = Callable[[str, ActionKind], float]


def _unit(_name, _kind) -> float:
    return 1.0


def predict_state(state: ContradictionState, pair, pos_mag: float, neg_mag: float
                  ) -> ContradictionState:
    k, l = pair
    return shifted(state, pos_mag if k == COMPETE else -pos_mag,
                   neg_mag if l == COMPETE else -neg_mag)


def next_states(individual: Individual, behavior: Behavior,
                magnitude: Magnitude = _unit) -> list[ContradictionState]:
    """Every contradiction's state after one step of ``behavior``, in order."""
    # same arithmetic as predict_state, unrolled: this sits on the hot path
    out = []
    for state, pair in zip(individual.contradictions, behavior):
        pos_kind, neg_kind = _PAIR_ACTIONS[pair]
        name = state.id.name
        d_pos = magnitude(name, pos_kind)
        d_neg = magnitude(name, neg_kind)
        if pair[0] != COMPETE:
            d_pos = -d_pos
        if pair[1] != COMPETE:
            d_neg = -d_neg
        out.append(ContradictionState(state.id, max(state.force_pos + d_pos, FORCE_FLOOR),
                                      max(state.force_neg + d_neg, FORCE_FLOOR)))
    return out


def predict_sharpness(individual: Individual, behavior: Behavior,
                      magnitude: Magnitude = _unit) -> list[float]:
    """Sharpness of every contradiction after one step of ``behavior``."""
    return [sharpness(s) for s in next_states(individual, behavior, magnitude)]


def apply_behavior(individual: Individual, behavior: Behavior,
                   magnitude: Magnitude = _unit) -> Individual:
    """Return ``individual`` with every contradiction moved by its action pair."""
    return individual.with_states(next_states(individual, behavior, magnitude))


def _admissible(individual: Individual, games: Mapping[str, Game2x2], rng) -> list[Behavior]:
    per = []
    for name in individual.names:
        if name not in games:
            raise KeyError(f"no game for contradiction {name!r}")
        per.append(admissible_pairs(games[name], rng))
    return list(itertools.product(*per))


def top_ties(items: list, key) -> list:
    best = None
    out = []
    for it in items:
        v = key(it)
        if best is None or v > best + _EPS:
            best, out = v, [it]
        elif abs(v - best) <= _EPS:
            out.append(it)
    return out


def _pick(items: list, rng):
    if len(items) == 1:
        return items[0]
    return items[rng.randrange(len(items))]


def _utility(individual: Individual):
    cache = {}

    def mu(b):
        if b not in cache:
            cache[b] = individual.evaluate_utility(b)
        return cache[b]
    return mu


ClaimsFor = Callable[[Behavior], Sequence[ResourceClaim]]


def _claims_fn(claims) -> ClaimsFor:
    if claims is None:
        return lambda b: ()
    if callable(claims):
        return claims
    static = tuple(claims)
    return lambda b: static


def _claim_fraction(cl: Sequence[ResourceClaim]) -> float:
    return sum(c.fraction for c in cl)


# --- selection -------------------------------------------------------------

def select_isolated(individual: Individual, games: Mapping[str, Game2x2], rng,
                    *, detail: bool = False):
    """Best-utility behaviour among those keeping every internal game in equilibrium."""
    admissible = _admissible(individual, games, rng)
    if len(admissible) == 1:
        chosen = admissible[0]
    else:
        chosen = _pick(top_ties(admissible, _utility(individual)), rng)
    return Selection(chosen, admissible) if detail else chosen


def _rank_in_swarm(individual, admissible, claims, diagnostics):
    if claims is None:  # nothing claimed: every behaviour feasible, all fractions zero
        return top_ties(admissible, _utility(individual))
    claims_for = _claims_fn(claims)
    feasible = []
    for b in admissible:
        cl = claims_for(b)
        if all(c.feasible for c in cl):
            feasible.append((b, cl))
    if not feasible:
        diagnostics.append("no feasible equilibrium behaviour; taking least resource-hungry")
        least = min(_claim_fraction(claims_for(b)) for b in admissible)
        return [b for b in admissible
                if abs(_claim_fraction(claims_for(b)) - least) <= _EPS]
    mu = _utility(individual)
    top = top_ties(feasible, lambda bc: mu(bc[0]))
    top = top_ties(top, lambda bc: _claim_fraction(bc[1]))
    return [b for b, _ in top]


def select_in_swarm(individual: Individual, games: Mapping[str, Game2x2], claims, rng,
                    *, detail: bool = False):
    """Like :func:`select_isolated`, also dropping behaviours whose resource claims
    exceed availability and preferring larger claimed-resource fractions."""
    diagnostics: list = []
    admissible = _admissible(individual, games, rng)
    if len(admissible) == 1:
        chosen = admissible[0]
    else:
        ranked = _rank_in_swarm(individual, admissible, claims, diagnostics)
        chosen = _pick(ranked, rng)
    for d in diagnostics:
        log.debug("agent %r: %s", individual.id, d)
    return Selection(chosen, admissible, diagnostics) if detail else chosen


def potential_mode(contexts: Sequence[InteractionContext], theta: float) -> dict:
    """Per focal contradiction: +1 to deviate from the crowd, -1 to conform.

    Contexts that disagree on one contradiction are settled by a majority
    weighted with each context's resource weight; ties conform.
    """
    votes: dict = {}
    for ctx in contexts:
        if not ctx.neighbor_sharpness:
            continue
        sign = 1.0 if ctx.scarcity >= theta else -1.0
        votes[ctx.contradiction] = votes.get(ctx.contradiction, 0.0) + sign * ctx.weight
    return {name: (1 if v > 0 else -1) for name, v in votes.items()}


def potential_score(individual: Individual, behavior: Behavior,
                    contexts: Sequence[InteractionContext], policy: PotentialPolicy,
                    magnitude: Magnitude = _unit, cache: dict | None = None) -> float:
    """Higher is better: closeness of predicted relative potential to the
    conform/deviate target chosen by resource scarcity.

    ``cache`` carries values shared by every candidate of one decision.
    """
    if cache is None:
        modes = potential_mode(contexts, policy.theta)
    else:
        modes = cache.get("modes")
        if modes is None:
            modes = cache["modes"] = potential_mode(contexts, policy.theta)
    if not modes:
        return 0.0
    predicted = dict(zip(individual.names, predict_sharpness(individual, behavior, magnitude)))
    score = 0.0
    for ctx in contexts:
        if ctx.contradiction not in modes or not ctx.neighbor_sharpness:
            continue
        key = id(ctx)
        crowd = cache.get(key) if cache is not None else None
        if crowd is None:
            dist = ctx.distribution(policy.bin_count)
            crowd = expectation(dist), swarm_potential(dist)
            if cache is not None:
                cache[key] = crowd
        rp = relative_potential_from(predicted[ctx.contradiction], *crowd)
        target = policy.deviate_target if modes[ctx.contradiction] > 0 else policy.conform_target
        score -= ctx.weight * abs(rp - target)
    return score


def select_with_potential(individual: Individual, games: Mapping[str, Game2x2], claims,
                          contexts, policy: PotentialPolicy,
                          rng, *, magnitude: Magnitude = _unit, detail: bool = False):
    """Adds a third key to :func:`select_in_swarm`: follow the crowd when
    resources are plentiful, break from it when they are scarce.

    ``contexts`` may be a zero-argument callable; it is then only called
    when the third key is actually needed.
    """
    diagnostics: list = []
    admissible = _admissible(individual, games, rng)
    if len(admissible) == 1:
        chosen = admissible[0]
    else:
        ranked = _rank_in_swarm(individual, admissible, claims, diagnostics)
        if len(ranked) > 1 and callable(contexts):
            contexts = contexts()
        live = [c for c in contexts if c.neighbor_sharpness] if len(ranked) > 1 else ()
        if live:
            dists: dict = {}
            ranked = top_ties(ranked, lambda b: potential_score(
                individual, b, live, policy, magnitude, dists))
        chosen = _pick(ranked, rng)
    return Selection(chosen, admissible, diagnostics) if detail else chosen
