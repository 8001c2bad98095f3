import random

import pytest

from contraswarm.behavior import (
    BehaviorSpaceTooLarge,
    InteractionContext,
    PotentialPolicy,
    ResourceClaim,
    apply_behavior,
    enumerate_behaviors,
    potential_mode,
    predict_sharpness,
    select_in_swarm,
    select_isolated,
    select_with_potential,
)
from contraswarm.contradiction import ContradictionId, ContradictionState, Individual
from contraswarm.game import COMPETE, COOPERATE, PAIRS, Game2x2

CC, CK, KC, KK = PAIRS  # compete/cooperate combinations in enumeration order
FLAT = Game2x2.common([[0, 0], [0, 0]])  # every pair is an equilibrium
PD = Game2x2(((1, 5), (0, 3)), ((1, 0), (5, 3)))  # (compete, compete) is the only one


def agent(n=1, utility=None, forces=(1.0, 1.0)):
    states = tuple(ContradictionState(ContradictionId(f"c{i}"), *forces) for i in range(n))
    return Individual("me", states, utility=utility)


def test_enumerate_sizes_and_order():
    assert enumerate_behaviors(agent(1)) == [(p,) for p in PAIRS]
    two = enumerate_behaviors(agent(2))
    assert len(two) == 16
    assert two[:5] == [(CC, CC), (CC, CK), (CC, KC), (CC, KK), (CK, CC)]
    with pytest.raises(BehaviorSpaceTooLarge):
        enumerate_behaviors(agent(9))


def test_isolated_equilibrium_dominates_utility():
    # utility loves mutual cooperation, which is not an equilibrium
    def mu(ind, b):
        return 1.0 if b == (KK,) else 0.0
    assert select_isolated(agent(1, mu), {"c0": PD}, random.Random(0)) == (CC,)


def test_isolated_product_of_unique_equilibria():
    matching = Game2x2.common([[0, 0], [0, 1]])  # (cooperate, cooperate) strictly best
    out = select_isolated(agent(2), {"c0": PD, "c1": matching}, random.Random(0))
    assert out == (CC, KK)


def test_isolated_seeded_tie_break():
    picks = [select_isolated(agent(1), {"c0": FLAT}, random.Random(s)) for s in range(40)]
    assert picks == [select_isolated(agent(1), {"c0": FLAT}, random.Random(s))
                     for s in range(40)]
    assert set(picks) == {(p,) for p in PAIRS}


def test_isolated_utility_breaks_equilibrium_ties():
    def mu(ind, b):
        return 0.9 if b == (KC,) else 0.1
    assert select_isolated(agent(1, mu), {"c0": FLAT}, random.Random(3)) == (KC,)


def cell_claims(occupied):
    """Moving compete-first claims a neighbouring cell; one of them is taken."""
    def claims(b):
        wanted = 1.0 if b[0][0] == COMPETE else 0.5
        cap = 0.0 if (b[0] in occupied) else 1.0
        return [ResourceClaim("position", wanted, cap)]
    return claims


def test_swarm_filters_exclusive_occupied():
    out = {select_in_swarm(agent(1), {"c0": FLAT}, cell_claims({CC}), random.Random(s))
           for s in range(30)}
    assert out == {(CK,)}  # CC is blocked, CK has the largest feasible claim


def test_swarm_prefers_larger_claim_at_equal_utility():
    def claims(b):
        return [ResourceClaim("food", {CC: 0.2, CK: 0.9, KC: 0.5, KK: 0.1}[b[0]], 1.0)]
    assert select_in_swarm(agent(1), {"c0": FLAT}, claims, random.Random(0)) == (CK,)


def test_swarm_abundant_matches_isolated_outcome():
    def mu(ind, b):
        return {CC: 0.2, CK: 0.9, KC: 0.9, KK: 0.1}[b[0]]

    def claims(b):
        return [ResourceClaim("food", 1.0 if b[0] == KC else 0.5, 10.0)]
    ind = agent(1, mu)
    assert select_in_swarm(ind, {"c0": FLAT}, claims, random.Random(1)) == (KC,)
    assert select_isolated(ind, {"c0": FLAT}, random.Random(1)) in {(CK,), (KC,)}


def test_swarm_all_infeasible_least_hungry():
    def claims(b):
        return [ResourceClaim("food", {CC: 3, CK: 2, KC: 4, KK: 5}[b[0]], 1.0)]
    sel = select_in_swarm(agent(1), {"c0": FLAT}, claims, random.Random(0), detail=True)
    assert sel.behavior == (CK,)
    assert sel.diagnostics


def test_relaxing_resources_never_lowers_utility():
    rng = random.Random(4)
    for _ in range(100):
        table = {p: rng.random() for p in PAIRS}
        blocked = set(rng.sample(PAIRS, rng.randint(0, 3)))

        def mu(ind, b, table=table):
            return table[b[0]]
        ind = agent(1, mu)
        tight = select_in_swarm(ind, {"c0": FLAT}, cell_claims(blocked), random.Random(0))
        loose = select_in_swarm(ind, {"c0": FLAT}, None, random.Random(0))
        assert table[loose[0]] >= table[tight[0]]


def crowd(values, scarcity):
    return [InteractionContext("me", "c0", ("me",) + tuple(range(len(values))),
                               frozenset({"position"}), (0.0,) + tuple(values),
                               scarcity=scarcity)]


def half(_name, _kind):
    return 0.5


def test_potential_conforms_when_plentiful():
    ind = agent(1)
    policy = PotentialPolicy()
    picks = {select_with_potential(ind, {"c0": FLAT}, None, crowd([-0.8] * 6, 0.0), policy,
                                   random.Random(s), magnitude=half) for s in range(20)}
    # the one pair that moves sharpness toward the crowd's negative side
    assert picks == {(KC,)}
    assert predict_sharpness(ind, (KC,), half)[0] == pytest.approx(-0.5)


def test_potential_deviates_when_crowded():
    ind = agent(1)
    policy = PotentialPolicy(theta=0.8)
    picks = {select_with_potential(ind, {"c0": FLAT}, None, crowd([-0.8] * 6, 0.9), policy,
                                   random.Random(s), magnitude=half) for s in range(40)}
    assert (KC,) not in picks
    assert all(predict_sharpness(ind, b, half)[0] >= 0 for b in picks)


def test_potential_without_neighbours_is_swarm_choice():
    ind = agent(2)
    games = {"c0": FLAT, "c1": FLAT}
    empty = [InteractionContext("me", "c0", ("me",))]
    for s in range(20):
        a = select_with_potential(ind, games, None, empty, PotentialPolicy(), random.Random(s))
        b = select_in_swarm(ind, games, None, random.Random(s))
        assert a == b
        lazy = select_with_potential(ind, games, None, lambda: [], PotentialPolicy(),
                                     random.Random(s))
        assert lazy == b


def test_potential_mode_weighted_majority():
    ctx = [InteractionContext("me", "c0", ("me", 1), neighbor_sharpness=(0.1, 0.2),
                              scarcity=0.9, weight=1.0),
           InteractionContext("me", "c0", ("me", 2), neighbor_sharpness=(0.1, 0.2),
                              scarcity=0.1, weight=2.0)]
    assert potential_mode(ctx, 0.8) == {"c0": -1}
    ctx[0].weight = 3.0
    assert potential_mode(ctx, 0.8) == {"c0": 1}


def test_selection_is_reproducible_and_admissible():
    games = {"c0": PD, "c1": FLAT}
    ind = agent(2)
    for s in range(10):
        sel = select_with_potential(ind, games, None, crowd([0.3] * 3, 0.0), PotentialPolicy(),
                                    random.Random(s), detail=True)
        again = select_with_potential(ind, games, None, crowd([0.3] * 3, 0.0),
                                      PotentialPolicy(), random.Random(s))
        assert sel.behavior == again
        assert sel.behavior in sel.admissible


def test_apply_behavior_moves_forces():
    ind = agent(1, forces=(3.0, 1.0))
    moved = apply_behavior(ind, ((COOPERATE, COMPETE),))
    s = moved.state("c0")
    assert (s.force_pos, s.force_neg) == (2.0, 2.0)


def test_context_requires_centre():
    with pytest.raises(ValueError):
        InteractionContext("me", "c0", (1, 2))
    with pytest.raises(ValueError):
        PotentialPolicy(theta=1.0)
