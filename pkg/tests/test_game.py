import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from contraswarm.game import (
    COMPETE,
    COOPERATE,
    PAIRS,
    ForageModel,
    Game2x2,
    admissible_pairs,
    ant_forage_payoffs,
    equilibrium,
    expected_payoffs,
    forage_payoff_values,
    mixed_nash,
    old_source_gain,
    pure_nash,
)
from contraswarm.scenarios.pd import PAYOFF


def brute_force_nash(game):
    """Every cell checked against both unilateral deviations."""
    out = []
    for k in (0, 1):
        for l in (0, 1):
            row_best = game.pos[k][l] >= max(game.pos[0][l], game.pos[1][l])
            col_best = game.neg[k][l] >= max(game.neg[k][0], game.neg[k][1])
            if row_best and col_best:
                out.append((k, l))
    return out


def pd_game():
    # compete = confess (defect), cooperate = refuse; cells[k][l] = (row, column)
    act = {COMPETE: False, COOPERATE: True}
    return Game2x2.from_cells([[PAYOFF[act[k], act[l]] for l in (COMPETE, COOPERATE)]
                               for k in (COMPETE, COOPERATE)])


def test_pd_unique_equilibrium():
    game = pd_game()
    assert pure_nash(game) == [(COMPETE, COMPETE)]
    assert game.cell(COMPETE, COMPETE) == (1.0, 1.0)


def test_all_equal_cells_all_equilibria():
    assert pure_nash(Game2x2.common([[2, 2], [2, 2]])) == list(PAIRS)


def test_matching_pennies_has_no_pure_equilibrium():
    game = Game2x2(((1, -1), (-1, 1)), ((-1, 1), (1, -1)))
    assert pure_nash(game) == []
    p, q, flag = mixed_nash(game)
    assert (p, q, flag) == (0.5, 0.5, False)


def test_mixed_hand_solved():
    # by hand: the column side is indifferent when 3p = 1 - p, so p = 1/4;
    # the row side when 1 - q = q, so q = 1/2
    game = Game2x2(((0, 1), (1, 0)), ((3, 0), (0, 1)))
    assert pure_nash(game) == []
    p, q, flag = mixed_nash(game)
    assert (p, q, flag) == (0.25, 0.5, False)
    ev = expected_payoffs(game, p, q)
    assert ev["pos_compete"] == pytest.approx(ev["pos_cooperate"], abs=1e-9)
    assert ev["neg_compete"] == pytest.approx(ev["neg_cooperate"], abs=1e-9)


def test_degenerate_falls_back_to_uniform():
    # the column player's payoffs do not depend on anything: no indifference point
    game = Game2x2(((1, 0), (0, 1)), ((2, 2), (2, 2)))
    assert mixed_nash(game) == (0.5, 0.5, True)


def test_equilibrium_result_shape():
    assert equilibrium(pd_game()).mixed is None
    res = equilibrium(Game2x2(((1, -1), (-1, 1)), ((-1, 1), (1, -1))))
    assert res.pure == [] and res.mixed == (0.5, 0.5)


def test_pure_nash_matches_brute_force_1000():
    rng = random.Random(11)
    for _ in range(1000):
        vals = [rng.choice([rng.uniform(-5, 5), float(rng.randint(-2, 2))]) for _ in range(8)]
        game = Game2x2(((vals[0], vals[1]), (vals[2], vals[3])),
                       ((vals[4], vals[5]), (vals[6], vals[7])))
        assert pure_nash(game) == brute_force_nash(game)


payoff = st.floats(-100, 100, allow_nan=False)


@given(st.lists(payoff, min_size=8, max_size=8), st.floats(0.01, 50), st.floats(-50, 50))
def test_affine_invariance(v, scale, shift):
    game = Game2x2(((v[0], v[1]), (v[2], v[3])), ((v[4], v[5]), (v[6], v[7])))
    moved = game.transformed(scale_pos=scale, shift_pos=shift)
    # exact ties can be broken by rounding in the transform, so compare on clear games
    gaps = [abs(a - b) for a, b in ((v[0], v[2]), (v[1], v[3]))]
    if min(gaps) > 1e-6:
        assert pure_nash(moved) == pure_nash(game)


@given(st.lists(payoff, min_size=8, max_size=8))
def test_mixed_in_unit_square_and_indifferent(v):
    game = Game2x2(((v[0], v[1]), (v[2], v[3])), ((v[4], v[5]), (v[6], v[7])))
    p, q, flag = mixed_nash(game)
    assert 0.0 <= p <= 1.0 and 0.0 <= q <= 1.0
    if not flag and not pure_nash(game):
        ev = expected_payoffs(game, p, q)
        scale = max(1.0, max(map(abs, v)))
        assert abs(ev["pos_compete"] - ev["pos_cooperate"]) <= 1e-9 * scale
        assert abs(ev["neg_compete"] - ev["neg_cooperate"]) <= 1e-9 * scale


def test_admissible_realises_mixed_reproducibly():
    game = Game2x2(((1, -1), (-1, 1)), ((-1, 1), (1, -1)))
    a = [admissible_pairs(game, random.Random(5)) for _ in range(3)]
    assert a[0] == a[1] == a[2] and len(a[0]) == 1


def test_game_validation():
    with pytest.raises(ValueError):
        Game2x2(((1, 2), (3,)), ((1, 2), (3, 4)))
    with pytest.raises(ValueError):
        Game2x2(((1, float("inf")), (3, 4)), ((1, 2), (3, 4)))


# -- foraging payoffs


def test_forage_no_trail_favours_exploring():
    g = ant_forage_payoffs([0.0] * 8)
    assert g.neg[0] == (0.0, 0.0)
    assert g.pos[COMPETE][0] > 0
    assert pure_nash(g)[0][0] == COMPETE


def test_forage_strong_trail_maximises_old_high():
    strong = ant_forage_payoffs([0.0] * 7 + [5.0]).neg[0][COMPETE]
    weaker = ant_forage_payoffs([0.0] * 7 + [0.5]).neg[0][COMPETE]
    assert strong > weaker > 0
    assert strong == pytest.approx(0.5, abs=1e-3)


def test_forage_stale_trace_is_negative():
    g = ant_forage_payoffs([0.05] * 8)
    assert g.neg[0][COMPETE] < 0
    assert old_source_gain(0.05) < 0 < old_source_gain(0.2)


def test_forage_empty_is_zero():
    g = ant_forage_payoffs([])
    assert g.pos == ((0.0, 0.0), (0.0, 0.0)) and g.neg == ((0.0, 0.0), (0.0, 0.0))


def test_forage_values_match_game():
    levels = (0.0, 0.3, 2.0, 0.01)
    model = ForageModel(p_new=0.02)
    r_new, r_follow, o_high, o_low = forage_payoff_values(levels, model)
    g = ant_forage_payoffs(levels, model)
    assert g.pos == ((r_new, r_new), (r_follow, r_follow))
    assert g.neg == ((o_high, o_low), (o_high, o_low))
