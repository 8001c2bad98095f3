import numpy as np
import pytest

from contraswarm.game import COMPETE, COOPERATE, pure_nash
from contraswarm.scenarios import ConfigError
from contraswarm.scenarios.geese import (
    Flock,
    GooseConfig,
    gap_sharpness,
    lateral_sharpness,
    next_sharpness,
    station_game,
)


def line_flock(gap=10.0, offset=2.0, n=10):
    """Leader in front, each follower ``gap`` behind and ``offset`` to the side."""
    fl = Flock(GooseConfig(flock=n), 0)
    fl.x = 1000.0 - gap * np.arange(n)
    fl.y = offset * (np.arange(n) % 2)
    fl.v = np.ones(n)
    fl._observe()
    return fl


def test_sharpness_of_gap_and_offset():
    cfg = GooseConfig()
    assert gap_sharpness(4.0, cfg) == 0.0
    assert gap_sharpness(10.0, cfg) == 0.999  # (10 - 4) / 6 = 1, clamped
    assert gap_sharpness(1.0, cfg) == pytest.approx(-0.5)
    assert lateral_sharpness(-2.0, cfg) == 0.0
    assert lateral_sharpness(5.0, cfg) == pytest.approx(0.75)


def test_hand_worked_far_follower():
    # lam 0.999: forces (0.9995, 0.0005); step 0.02 * 0.999 / 2 moves them to
    # (0.98951, 0.01049), so lam 0.97902 and target gap 4 + 6 * 0.97902 = 9.87412;
    # speed 1 + (10 - 9.87412) = 1.12588
    fl = line_flock()
    assert np.all(fl.lam[1:, 0] == 0.999)
    assert np.all(fl.lam[:, 1] == 0.0)
    fl.step()
    assert fl.v[1:] == pytest.approx(np.full(9, 1.12588), abs=1e-9)
    assert fl.v[0] == 1.0
    assert fl.y.tolist() == pytest.approx([0.0, 2.0] * 5)


def test_ideal_spacing_is_steady():
    fl = line_flock(gap=4.0)
    assert np.all(fl.lam == 0.0)
    for _ in range(5):
        fl.step()
    assert np.all(fl.lam == 0.0)
    assert np.all(fl.v == 1.0)


def test_station_game_deadband():
    gain, effort = 0.02, 0.02 * 0.02
    # correcting by gain*|lam| only beats the effort once |lam| > 0.02
    assert pure_nash(station_game(0.5, gain, effort)) == [(COOPERATE, COMPETE)]
    assert pure_nash(station_game(-0.5, gain, effort)) == [(COMPETE, COOPERATE)]
    assert set(pure_nash(station_game(0.01, gain, effort))) == {
        (COMPETE, COMPETE), (COOPERATE, COOPERATE)}
    assert next_sharpness(0.5, (COOPERATE, COMPETE), gain) == pytest.approx(0.49)


@pytest.mark.parametrize("seed", [0, 3])
def test_vectorised_matches_engine(seed):
    fast = Flock(GooseConfig(), seed)
    slow = Flock(GooseConfig(engine=True), seed)
    for _ in range(150):
        a, b = fast.step(), slow.step()
        assert np.array_equal(a, b)
    assert fast.snapshot() == slow.snapshot()


def test_speeds_stay_in_limits():
    cfg = GooseConfig(flock=15)
    fl = Flock(cfg, 2)
    for _ in range(300):
        lam = fl.step()
        assert np.all(fl.v >= cfg.speed_min) and np.all(fl.v <= cfg.speed_max)
        assert np.all(np.abs(lam) < 1.0)


def test_validation():
    for bad in (dict(flock=9), dict(flock=21), dict(gap_min=5.0), dict(gain=1.0),
                dict(leader_speed=2.0), dict(steps=0)):
        with pytest.raises(ConfigError):
            Flock(GooseConfig(**bad), 0)
