"""Worlds the agents live in: resources, occupancy, pheromone and neighbourhoods."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from .behavior import InteractionContext

MOORE = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))
PHEROMONE_FLOOR = 1e-6
_POSITION, _PHEROMONE = frozenset({"position"}), frozenset({"pheromone"})
EMPTY = -1


class ResourceKind(str, Enum):
    MATERIAL = "material"
    ENERGY = "energy"
    INFORMATION = "information"


class Access(str, Enum):
    SHARED = "shared"
    EXCLUSIVE = "exclusive"


class Lifecycle(str, Enum):
    CONSUMABLE = "consumable"
    RENEWABLE = "renewable"


@dataclass
class ResourceSpec:
    name: str
    kind: ResourceKind
    quantity: float  # math.inf for unbounded
    access: Access
    lifecycle: Lifecycle

    def __post_init__(self):
        if self.quantity < 0 or (self.quantity == 0 and self.lifecycle is not Lifecycle.CONSUMABLE):
            raise ValueError(f"{self.name}: quantity must be positive unless a depleted consumable")


def ant_resources(n: int, sources: int, units: int) -> dict[str, ResourceSpec]:
    """The four resources of the foraging world."""
    return {
        "position": ResourceSpec("position", ResourceKind.MATERIAL, n * n,
                                 Access.EXCLUSIVE, Lifecycle.RENEWABLE),
        "nest": ResourceSpec("nest", ResourceKind.MATERIAL, 1, Access.SHARED, Lifecycle.RENEWABLE),
        "food": ResourceSpec("food", ResourceKind.MATERIAL, sources * units,
                             Access.EXCLUSIVE, Lifecycle.CONSUMABLE),
        "pheromone": ResourceSpec("pheromone", ResourceKind.INFORMATION, math.inf,
                                  Access.SHARED, Lifecycle.CONSUMABLE),
    }


@dataclass
class NeighborhoodView:
    """Read-only picture of the cells around one agent at decision time."""

    center: tuple
    radius: int
    agents: tuple  # (agent id, cell) of other agents in range
    cells: tuple  # in-bounds neighbour cells
    free: tuple  # neighbour cells an agent may move into
    pheromone: tuple  # concentration per entry of ``cells``
    food: tuple  # (cell, stock) of stocked sources in range

    @property
    def neighbor_ids(self) -> tuple:
        return tuple([a for a, _ in self.agents])

    @property
    def has_pheromone(self) -> bool:
        return bool(self.pheromone) and max(self.pheromone) > 0  # levels are never negative


@dataclass
class GridWorld:
    """Square grid with exclusive cells, consumable food stocks and a pheromone field.

    The nest cell is a shared sink: any number of agents may stand on it.
    """

    width: int
    height: int
    nest: tuple = (0, 0)
    occupancy: np.ndarray = field(default=None, repr=False)
    pheromone: np.ndarray = field(default=None, repr=False)
    food: dict = field(default_factory=dict)
    positions: dict = field(default_factory=dict)
    holders: dict = field(default_factory=dict)  # exclusive resource -> agent
    picked: int = 0
    delivered: int = 0

    def __post_init__(self):
        if self.occupancy is None:
            self.occupancy = np.full((self.width, self.height), EMPTY, dtype=np.int64)
        if self.pheromone is None:
            self.pheromone = np.zeros((self.width, self.height))
        self.nest = tuple(self.nest)
        self._frozen = None
        self._ring: dict = {}

    # -- decision phase
    def freeze(self):
        """Snapshot occupancy and pheromone as plain lists for a decision phase.

        Views built while frozen read the snapshot, so every agent decides on
        the same picture of the world. Any write thaws the grid again.
        """
        self._frozen = (self.occupancy.tolist(), self.pheromone.tolist())

    def thaw(self):
        self._frozen = None

    @property
    def frozen(self) -> bool:
        return self._frozen is not None

    def frozen_grids(self) -> tuple:
        """``(occupancy, pheromone)`` as nested lists from the current snapshot."""
        if self._frozen is None:
            raise RuntimeError("world is not frozen")
        return self._frozen

    # -- geometry
    def in_bounds(self, cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def neighbors(self, cell, radius: int = 1) -> list:
        if radius == 1:
            return list(self.ring(cell))
        return self._neighbors(cell, radius)

    def ring(self, cell) -> tuple:
        """In-bounds Moore neighbours of ``cell``, cached per cell."""
        cached = self._ring.get(cell)
        if cached is None:
            cached = self._ring[cell] = tuple(self._neighbors(cell, 1))
        return cached

    def _neighbors(self, cell, radius: int) -> list:
        x, y = cell
        out = []
        for dx in range(-radius, radius + 1):
            for dy in range(-radius, radius + 1):
                if (dx or dy) and 0 <= x + dx < self.width and 0 <= y + dy < self.height:
                    out.append((x + dx, y + dy))
        return out

    @staticmethod
    def distance(a, b) -> int:
        """Steps between two cells when diagonal moves are allowed."""
        return max(abs(a[0] - b[0]), abs(a[1] - b[1]))

    def is_free(self, cell) -> bool:
        return tuple(cell) == self.nest or self.occupancy[tuple(cell)] == EMPTY

    # -- agents
    def place(self, agent: int, cell) -> bool:
        self._frozen = None
        cell = tuple(cell)
        if not self.in_bounds(cell) or not self.is_free(cell):
            return False
        if cell != tuple(self.nest):
            self.occupancy[cell] = agent
        self.positions[agent] = cell
        return True

    def move(self, agent: int, cell) -> bool:
        """Claim ``cell`` as position; frees the old cell on success."""
        self._frozen = None
        cell = tuple(cell)
        old = self.positions[agent]
        if cell == old:
            return True
        if not self.in_bounds(cell) or not self.is_free(cell):
            return False
        if old != tuple(self.nest):
            self.occupancy[old] = EMPTY
        if cell != tuple(self.nest):
            self.occupancy[cell] = agent
        self.positions[agent] = cell
        return True

    def crowd(self, cell, exclude: int | None = None) -> int:
        """Number of agents on the Moore neighbours of ``cell``."""
        ring = self.ring(tuple(cell))
        if self._frozen:
            occ = self._frozen[0]
            cells = [occ[x][y] for x, y in ring]
        else:
            cells = [int(self.occupancy[c]) for c in ring]
        return sum(1 for a in cells if a != EMPTY and a != exclude)

    def pheromone_at(self, cell) -> float:
        if self._frozen:
            return self._frozen[1][cell[0]][cell[1]]
        return float(self.pheromone[tuple(cell)])

    # -- resources
    def claim(self, agent: int, resource: str, qty: float = 1, cell=None) -> bool:
        """Try to take ``qty`` of a resource; failure leaves the world untouched.

        ``position`` and ``food`` are exclusive, ``pheromone`` and ``nest`` are
        shared and always granted.
        """
        if qty <= 0:
            raise ValueError("claim quantity must be positive")
        if resource == "position":
            return self.move(agent, cell)
        if resource == "food":
            cell = tuple(cell)
            stock = self.food.get(cell, 0)
            if stock < qty:
                return False
            self.food[cell] = stock - qty
            self.picked += qty
            return True
        if resource in ("pheromone", "nest"):
            return True
        holder = self.holders.get(resource)
        if holder is not None and holder != agent:
            return False
        self.holders[resource] = agent
        return True

    def deliver(self, qty: int = 1):
        self.delivered += qty

    def deposit_pheromone(self, cell, amount: float):
        if amount < 0:
            raise ValueError("deposit must be non-negative")
        self._frozen = None
        self.pheromone[tuple(cell)] += amount

    def evaporate(self, rate: float):
        if not 0.0 <= rate < 1.0:
            raise ValueError("evaporation rate must lie in [0, 1)")
        self._frozen = None
        self.pheromone *= 1.0 - rate
        self.pheromone[self.pheromone < PHEROMONE_FLOOR] = 0.0

    def food_left(self) -> int:
        return int(sum(self.food.values()))

    # -- views
    def neighborhood(self, agent: int, radius: int = 1) -> NeighborhoodView:
        center = self.positions[agent]
        if radius == 1:
            cells = self.ring(center)
        else:
            cells = tuple(self._neighbors(center, radius))
        occ, ph = self._frozen if self._frozen else (self.occupancy.tolist(),
                                                     self.pheromone.tolist())
        nest = self.nest
        agents, free = [], []
        for c in cells:
            a = occ[c[0]][c[1]]
            if a != EMPTY and a != agent:
                agents.append((a, c))
            if a == EMPTY or c == nest:
                free.append(c)
        cx, cy = center
        food = tuple((c, s) for c, s in self.food.items()
                     if s > 0 and abs(c[0] - cx) <= radius and abs(c[1] - cy) <= radius)
        return NeighborhoodView(center, radius, tuple(agents), cells, tuple(free),
                                tuple([ph[x][y] for x, y in cells]), food)

    def snapshot(self) -> dict:
        return {
            "positions": {str(k): list(v) for k, v in sorted(self.positions.items())},
            "food": {f"{c[0]},{c[1]}": s for c, s in sorted(self.food.items())},
            "pheromone_total": float(self.pheromone.sum()),
            "picked": self.picked,
            "delivered": self.delivered,
        }


def build_interactions(view: NeighborhoodView, agent, sharpness: Mapping,
                       position_contradiction: str = "c2",
                       info_contradiction: str = "c1") -> list[InteractionContext]:
    """Interactions around one agent of the grid world.

    Contending for neighbouring positions is an interaction on
    ``position_contradiction``; sensing a pheromone trace is an interaction on
    ``info_contradiction``. ``sharpness[a][name]`` gives each agent's current
    sharpness.
    """
    out = []
    ids = view.neighbor_ids
    members = (agent,) + ids
    if ids:
        out.append(InteractionContext(
            agent, position_contradiction, members, _POSITION,
            tuple(sharpness[a][position_contradiction] for a in members),
            scarcity=len(ids) / max(len(view.cells), 1),
        ))
    if view.has_pheromone:
        out.append(InteractionContext(
            agent, info_contradiction, members, _PHEROMONE,
            tuple(sharpness[a][info_contradiction] for a in members),
            scarcity=0.0,
        ))
    return out


@dataclass
class ContinuousWorld:
    """Agents at 2-D positions; neighbours are found by Euclidean radius."""

    positions: np.ndarray

    def neighbors(self, agent: int, radius: float) -> np.ndarray:
        d = np.hypot(*(self.positions - self.positions[agent]).T)
        d[agent] = np.inf
        return np.nonzero(d <= radius)[0]
