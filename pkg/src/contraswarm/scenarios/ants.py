"""Ant foraging on a square grid around a central nest.

Two contradictions per ant:

* ``c1`` explore (positive) vs exploit (negative). Its game comes from the
  pheromone levels around the ant; both sides are pushed by the payoff they
  earn, so forces drift toward exploiting on strong trails and toward
  exploring elsewhere. Forces decay slowly so old experience fades.
* ``c2`` safe (positive) vs collision (negative). Forces are reset from the
  neighbourhood every step: ``1 + free cells`` against ``1 + occupied cells``.

An ant follows the strongest trail with probability equal to the exploit
side's relative force; otherwise it moves as its c1 action pair dictates.
Laden ants head for the nest and lay pheromone. Unladen ants have no map:
they find food by wandering or by climbing trails outward from the nest, and
give up and walk home after ``patience`` fruitless steps.

Each step has two phases. Every ant decides on a frozen view of the world,
then the moves are applied in shuffled order and the first claim on a cell
wins.
"""

from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass, field

import numpy as np

from ..behavior import PotentialPolicy, next_states, select_with_potential, top_ties
from ..contradiction import (
    FORCE_FLOOR,
    ActionKind,
    ContradictionId,
    ContradictionState,
    ImportanceOrder,
    Individual,
)
from ..environment import EMPTY, GridWorld, build_interactions
from ..game import (COMPETE, COOPERATE, PAIRS, ForageModel, Game2x2, admissible_pairs,
                    ant_forage_payoffs, forage_payoff_values)
from ..metrics import bin_sharpness, expectation, relative_potential_from, swarm_potential
from . import ConfigError

C1 = ContradictionId("c1", "explore", "exploit")
C2 = ContradictionId("c2", "safe", "collision")
NAMES = ("c1", "c2")

# laden or heading for a known source: safety first; otherwise information first
CAREFUL = ImportanceOrder([("c2", "c1")])
CURIOUS = ImportanceOrder([("c1", "c2")])


@dataclass
class AntConfig:
    grid: int = 50
    sources: int = 3
    units: int = 30
    ants: int = 60
    evaporation: float = 0.02
    deposit: float = 1.0
    crowd_threshold: int = 4
    steps: int = 5000
    source_min_distance: int = 10
    source_max_distance: int = 20
    gain: float = 0.05  # force change per unit of payoff
    decay: float = 0.02  # per-step fade of the c1 forces
    patience: int = 200  # an unladen ant this long out heads home and starts over
    new_source_gain: float = 0.02  # payoff of exploring where no trail is sensed
    theta: float = 0.8
    bins: int = 21
    engine: bool = False  # route every decision through the generic engine (slow)

    def validate(self):
        if self.grid < 10:
            raise ConfigError("grid must be at least 10")
        if self.sources < 1 or self.units < 1:
            raise ConfigError("need at least one source holding at least one unit")
        if self.ants < 1 or self.ants > self.grid * self.grid:
            raise ConfigError("ant count must be positive and fit the grid")
        if not 0.0 <= self.evaporation < 1.0:
            raise ConfigError("evaporation must lie in [0, 1)")
        if self.deposit < 0:
            raise ConfigError("deposit must be non-negative")
        if not 1 <= self.source_min_distance <= self.source_max_distance:
            raise ConfigError("need 1 <= source_min_distance <= source_max_distance")
        if self.source_min_distance > self.grid // 2 - 1:
            raise ConfigError("sources cannot be that far from the nest on this grid")
        if self.gain <= 0 or not 0 <= self.decay < 1:
            raise ConfigError("gain must be positive and decay in [0, 1)")
        if not 0 < self.new_source_gain <= 1:
            raise ConfigError("new_source_gain must lie in (0, 1]")
        if self.steps < 1 or self.patience < 1:
            raise ConfigError("steps and patience must be at least 1")
        return self


def _lam(pos: float, neg: float) -> float:
    # sharpness() of a state with these forces, without building the state
    share = pos / (pos + neg)
    return share - (1.0 - share)


def cheb(a, b) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


@lru_cache(maxsize=None)
def crowd_game(crowd: int, cells: int = 8) -> Game2x2:
    """Safe (row) versus collision (column) game from the number of neighbours.

    The safe side gains by pressing its case as the crowd grows; the
    collision side gains while there is room.
    """
    c = min(max(crowd / cells, 0.0), 1.0)
    return Game2x2.from_cells((
        ((c, 1.0 - c), (c, c)),
        ((1.0 - c, 1.0 - c), (1.0 - c, c)),
    ))


def route_efficiency(start, source, moves: int) -> float:
    """Shortest over actual length of a walk from ``start`` that reaches ``source``.

    A source is reached from an adjacent cell, so a walk of ``moves`` steps
    covers ``moves + 1`` cells of distance.
    """
    return min(max(cheb(start, source), 1) / (moves + 1), 1.0)


def ant_utility(route, known_sources, world=None) -> float:
    """Best route efficiency over the known sources that ``route`` reaches.

    ``route`` is the list of cells of the latest nest-anchored walk. Sources the
    walk never comes within one cell of do not count. Returns 0 when nothing
    known is reached.
    """
    route = [tuple(c) for c in route]
    if not route:
        return 0.0
    best = 0.0
    for fs in known_sources:
        fs = tuple(fs)
        if world is not None and not world.in_bounds(fs):
            continue
        for moves, cell in enumerate(route):
            if cheb(cell, fs) <= 1:
                best = max(best, route_efficiency(route[0], fs, moves))
                break
    return best


@dataclass
class Ant:
    id: int
    individual: Individual
    start: tuple  # cell where the current trip began
    laden: bool = False
    source: tuple | None = None  # where the current load came from
    known: set = field(default_factory=set)  # stocked sources seen
    moves: int = 0  # steps since the trip began
    efficiency: float = 0.0  # route efficiency of the current load


def _utility(individual: Individual, behavior) -> float:
    return individual.properties["utility"]


@dataclass
class _Plan:
    ant: Ant
    cell: tuple | None = None
    pick: tuple | None = None
    drop: bool = False
    restart: bool = False


class Colony:
    def __init__(self, config: AntConfig, seed: int):
        self.config = cfg = config.validate()
        self.rng = rng = random.Random(seed)
        n = cfg.grid
        nest = (n // 2, n // 2)
        self.world = world = GridWorld(n, n, nest=nest)
        ring = [(x, y) for x in range(n) for y in range(n)
                if cfg.source_min_distance <= cheb((x, y), nest) <= cfg.source_max_distance]
        if len(ring) < cfg.sources:
            raise ConfigError("not enough cells to place the food sources")
        world.food = {c: cfg.units for c in rng.sample(ring, cfg.sources)}
        self.policy = PotentialPolicy(theta=cfg.theta, bin_count=cfg.bins)
        self.forage = ForageModel(p_new=cfg.new_source_gain)
        self.ants = []
        for i in range(cfg.ants):
            world.place(i, nest)
            # no shared disposition yet: explore/exploit balance drawn across the range
            c1 = ContradictionState.from_sharpness(C1, rng.uniform(-0.95, 0.95))
            ind = Individual(i, (c1, ContradictionState(C2, 1.0, 1.0)), order=CURIOUS,
                             utility=_utility, properties={"utility": 0.0})
            self.ants.append(Ant(i, ind, start=nest))
        self.step_index = 0
        self._sharp_cache: dict = {}

    # -- queries
    def laden_count(self) -> int:
        return sum(a.laden for a in self.ants)

    def _sharpness_rows(self) -> list:
        # individuals are replaced, never mutated, so identity tells staleness
        rows = []
        for a in self.ants:
            ind = a.individual
            hit = self._sharp_cache.get(a.id)
            if hit is None or hit[0] is not ind:
                hit = self._sharp_cache[a.id] = (ind, ind.sharpness_vector())
            rows.append(hit[1])
        return rows

    def sharpness(self) -> np.ndarray:
        return np.array(self._sharpness_rows())

    def laden_efficiencies(self) -> list[float]:
        return [a.efficiency for a in self.ants if a.laden]

    def conserved(self) -> bool:
        w = self.world
        return w.picked == w.delivered + self.laden_count()

    # -- decision phase
    def _decide(self, ant: Ant, sharp: dict) -> _Plan:
        if self.config.engine:
            return self._decide_engine(ant, sharp)
        return self._decide_direct(ant, sharp)

    def _decide_engine(self, ant: Ant, sharp: dict) -> _Plan:
        cfg, world, rng = self.config, self.world, self.rng
        view = world.neighborhood(ant.id)
        pos, nest = view.center, world.nest
        stocked = dict(view.food)
        known = ant.known
        if known:
            for fs in [fs for fs in known if fs not in stocked and cheb(fs, pos) <= 1]:
                known.discard(fs)  # came back to find it empty
        known.update(stocked)

        occupied = len(view.agents)
        cells = len(view.cells)
        c2 = ContradictionState(C2, 1.0 + cells - occupied, 1.0 + occupied)
        ind = ant.individual.with_states((ant.individual.contradictions[0], c2))
        homing = ant.laden or ant.moves >= cfg.patience
        ind.order = CAREFUL if ant.laden or known else CURIOUS
        ind.properties = {"utility": self._expected_efficiency(ant, pos)}

        forage = ant_forage_payoffs(view.pheromone, self.forage)
        games = {"c1": forage, "c2": crowd_game(occupied, max(cells, 1))}
        gain = cfg.gain
        # a side moves by what it earns; a loss moves it by (almost) nothing
        c1_step = {
            ActionKind.STRENGTHEN_POS: max(gain * forage.pos[COMPETE][0], 1e-9),
            ActionKind.WEAKEN_POS: max(gain * forage.pos[COOPERATE][0], 1e-9),
            ActionKind.STRENGTHEN_NEG: max(gain * forage.neg[0][COMPETE], 1e-9),
            ActionKind.WEAKEN_NEG: max(gain * forage.neg[0][COOPERATE], 1e-9),
        }

        def magnitude(name, kind):
            return c1_step[kind] if name == "c1" else gain

        behavior = select_with_potential(ind, games, None,
                                         lambda: build_interactions(view, ant.id, sharp),
                                         self.policy, rng,
                                         magnitude=magnitude)
        c1, c2 = next_states(ind, behavior, magnitude)
        keep = 1.0 - cfg.decay
        c1 = ContradictionState(C1, max(c1.force_pos * keep, FORCE_FLOOR),
                                max(c1.force_neg * keep, FORCE_FLOOR))
        ant.individual = ind.with_states((c1, c2))

        if homing and cheb(pos, nest) <= 1:
            return _Plan(ant, drop=ant.laden, restart=True)
        if not ant.laden and stocked:
            return _Plan(ant, pick=min(stocked, key=lambda fs: (cheb(fs, pos), fs)))
        return _Plan(ant, cell=self._choose_cell(
            ant, pos, view.free, dict(zip(view.cells, view.pheromone)),
            nest if homing else None, behavior, c1))

    def _decide_direct(self, ant: Ant, sharp: dict) -> _Plan:
        """Same decision as :meth:`_decide_engine`, specialised to the ant games.

        Both games are separable, so each has a pure equilibrium and no
        randomness is drawn for them. The utility does not depend on the
        behaviour, so the equilibria go straight to the potential key.
        """
        cfg, world, rng = self.config, self.world, self.rng
        # the neighbourhood view, read straight off the frozen grids
        me = ant.id
        pos, nest = world.positions[me], world.nest
        ring = world.ring(pos)
        occ, ph = world.frozen_grids()
        agents, free, levels = [], [], []
        for c in ring:
            x, y = c
            a = occ[x][y]
            levels.append(ph[x][y])
            if a != EMPTY and a != me:
                agents.append(a)
            if a == EMPTY or c == nest:
                free.append(c)
        levels = tuple(levels)
        px, py = pos
        stocked = {c: n for c, n in world.food.items()
                   if n > 0 and abs(c[0] - px) <= 1 and abs(c[1] - py) <= 1}
        known = ant.known
        if known:
            for fs in [fs for fs in known if fs not in stocked and cheb(fs, pos) <= 1]:
                known.discard(fs)
        known.update(stocked)

        ids = tuple(agents)
        cells = len(ring)
        occupied = len(ids)
        homing = ant.laden or ant.moves >= cfg.patience
        r_new, r_follow, o_high, o_low = forage_payoff_values(levels, self.forage)
        # each side's payoff ignores the other's choice: equilibria are best-reply products
        pairs1 = [p for p in PAIRS
                  if (r_new >= r_follow if p[0] == COMPETE else r_follow >= r_new)
                  and (o_high >= o_low if p[1] == COMPETE else o_low >= o_high)]
        pairs2 = admissible_pairs(crowd_game(occupied, max(cells, 1)), rng)
        options = [(p1, p2) for p1 in pairs1 for p2 in pairs2]

        gain = cfg.gain
        up1, down1 = max(gain * r_new, 1e-9), max(gain * r_follow, 1e-9)
        up2, down2 = max(gain * o_high, 1e-9), max(gain * o_low, 1e-9)
        old1 = ant.individual.contradictions[0]
        f1p, f1n = old1.force_pos, old1.force_neg
        f2p, f2n = 1.0 + cells - occupied, 1.0 + occupied

        def forces(behavior):
            (k1, l1), (k2, l2) = behavior
            return (max(f1p + (up1 if k1 == COMPETE else -down1), FORCE_FLOOR),
                    max(f1n + (up2 if l1 == COMPETE else -down2), FORCE_FLOOR),
                    max(f2p + (gain if k2 == COMPETE else -gain), FORCE_FLOOR),
                    max(f2n + (gain if l2 == COMPETE else -gain), FORCE_FLOOR))

        if len(options) == 1:
            behavior = options[0]
        else:
            crowds = []  # (column, mode target, crowd mean, crowd potential), c2 first
            members = (me,) + ids
            if ids:
                deviate = occupied / max(cells, 1) >= cfg.theta
                crowds.append((1, deviate, members))
            if max(levels) > 0:
                crowds.append((0, 0.0 >= cfg.theta, members))
            if crowds:
                policy = self.policy
                summary = []
                for col, deviate, group in crowds:
                    dist = bin_sharpness([sharp[a][col] for a in group], policy.bin_count)
                    target = policy.deviate_target if deviate else policy.conform_target
                    summary.append((col, target, expectation(dist), swarm_potential(dist)))

                def score(behavior):
                    fp1, fn1, fp2, fn2 = forces(behavior)
                    lam = (_lam(fp1, fn1), _lam(fp2, fn2))
                    total = 0.0
                    for col, target, mean, potential in summary:
                        total -= abs(relative_potential_from(lam[col], mean, potential) - target)
                    return total

                options = top_ties(options, score)
            behavior = options[0] if len(options) == 1 else options[rng.randrange(len(options))]

        fp1, fn1, fp2, fn2 = forces(behavior)
        keep = 1.0 - cfg.decay
        c1 = ContradictionState(C1, max(fp1 * keep, FORCE_FLOOR), max(fn1 * keep, FORCE_FLOOR))
        ind = ant.individual.with_states((c1, ContradictionState(C2, fp2, fn2)))
        ind.order = CAREFUL if ant.laden or known else CURIOUS
        ind.properties = {"utility": self._expected_efficiency(ant, pos)}
        ant.individual = ind
        self._sharp_cache[me] = (ind, [_lam(c1.force_pos, c1.force_neg), _lam(fp2, fn2)])

        if homing and cheb(pos, nest) <= 1:
            return _Plan(ant, drop=ant.laden, restart=True)
        if not ant.laden and stocked:
            return _Plan(ant, pick=min(stocked, key=lambda fs: (cheb(fs, pos), fs)))
        return _Plan(ant, cell=self._choose_cell(ant, pos, free, dict(zip(ring, levels)),
                                                 nest if homing else None, behavior, c1))

    def _expected_efficiency(self, ant: Ant, pos) -> float:
        """Efficiency of the current trip if it went straight on to the nearest known source."""
        if ant.laden:
            return ant.efficiency
        if not ant.known:
            return 0.0
        # route_efficiency(start, fs, moves + steps still needed), unrolled
        (sx, sy), (px, py), moves = ant.start, pos, ant.moves
        best = 0.0
        for fx, fy in ant.known:
            ahead = max(abs(fx - px), abs(fy - py)) - 1
            eff = max(abs(fx - sx), abs(fy - sy), 1) / (moves + (ahead if ahead > 0 else 0) + 1)
            if eff > best:
                best = eff
        return min(best, 1.0)

    def _choose_cell(self, ant: Ant, pos, free, level: dict, target, behavior,
                     c1: ContradictionState):
        """Next cell from the free neighbours; ``level`` maps neighbour cells to pheromone."""
        rng = self.rng
        if not free:
            return None
        exploit_share = c1.force_neg / (c1.force_pos + c1.force_neg)
        (k, l), pair2 = behavior
        # a trail can only be followed where one is sensed
        follow = rng.random() < exploit_share and any(level[c] > 0 for c in free)
        uphill = follow or (k == COOPERATE and l == COMPETE)
        downhill = not follow and k == COOPERATE and l == COOPERATE

        px, py = pos
        if target is not None:
            tx, ty = target
            here = max(abs(px - tx), abs(py - ty))
            dist = {c: max(abs(c[0] - tx), abs(c[1] - ty)) for c in free}
            pool = [c for c in free if dist[c] < here] or \
                [c for c in free if dist[c] == here] or list(free)
        elif uphill or downhill:
            nx, ny = self.world.nest
            here = max(abs(px - nx), abs(py - ny))
            pool = [c for c in free if max(abs(c[0] - nx), abs(c[1] - ny)) > here] or list(free)
        else:
            pool = list(free)

        if ant.individual.order is CAREFUL:
            pool = self._crowd_filter(pool, pair2, ant.id) or pool

        if uphill:
            best = max([level[c] for c in pool])
            pool = [c for c in pool if level[c] == best]
        elif downhill:
            low = min([level[c] for c in pool])
            pool = [c for c in pool if level[c] == low]
        elif k == COMPETE and l == COMPETE:
            return rng.choices(pool, [1.0 + level[c] for c in pool])[0]
        return pool[rng.randrange(len(pool))] if len(pool) > 1 else pool[0]

    def _crowd_filter(self, pool, pair2, me):
        if pair2 == (COOPERATE, COMPETE):
            return pool  # enter freely
        crowd = self.world.crowd
        count = {c: crowd(c, exclude=me) for c in pool}
        if pair2 == (COMPETE, COOPERATE):
            low = min(count.values())
            return [c for c in pool if count[c] == low]
        limit = self.config.crowd_threshold
        return [c for c in pool if count[c] < limit]

    # -- apply phase
    def _apply(self, plan: _Plan):
        ant, world = plan.ant, self.world
        pos = world.positions[ant.id]
        if ant.laden:
            world.deposit_pheromone(pos, self.config.deposit)
        if plan.drop:
            world.deliver()
            ant.laden, ant.source, ant.efficiency = False, None, 0.0
        if plan.restart:
            ant.start, ant.moves = pos, 0
            return
        if plan.pick is not None:
            if world.claim(ant.id, "food", 1, plan.pick):
                ant.laden, ant.source = True, plan.pick
                ant.efficiency = route_efficiency(ant.start, plan.pick, ant.moves)
            else:
                ant.known.discard(plan.pick)
        elif plan.cell is not None:
            world.claim(ant.id, "position", 1, plan.cell)
        ant.moves += 1

    def step(self) -> np.ndarray:
        """Advance one tick; returns the per-ant sharpness after it."""
        rows = self._sharpness_rows()
        # the direct path reads rows by ant id (ids are list positions)
        sharp = ({a.id: dict(zip(NAMES, row)) for a, row in zip(self.ants, rows)}
                 if self.config.engine else rows)
        self.world.freeze()
        plans = [self._decide(a, sharp) for a in self.ants]
        self.world.thaw()
        self.rng.shuffle(plans)
        for plan in plans:
            self._apply(plan)
        self.world.evaporate(self.config.evaporation)
        self.step_index += 1
        return self.sharpness()

    def snapshot(self) -> dict:
        snap = self.world.snapshot()
        snap["step"] = self.step_index
        snap["laden"] = [a.id for a in self.ants if a.laden]
        return snap


def ants_step(colony: Colony) -> np.ndarray:
    return colony.step()
