"""Contradictions, their forces, and the six-part individual built on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Mapping

FORCE_FLOOR = 1e-6


class ModelViolation(ValueError):
    """A contradiction was given a state the model forbids (e.g. a zero force)."""


class ActionRejected(RuntimeError):
    """An action's resource needs were not covered by the claimed resources."""


@dataclass(frozen=True)
class ContradictionId:
    name: str
    positive_label: str = "pos"
    negative_label: str = "neg"

    def __post_init__(self):
        if not self.name:
            raise ModelViolation("contradiction name must be non-empty")
        if not self.positive_label or not self.negative_label:
            raise ModelViolation(f"{self.name}: side labels must be non-empty")
        if self.positive_label == self.negative_label:
            raise ModelViolation(f"{self.name}: side labels must differ")


@dataclass(frozen=True)
class ContradictionState:
    """Absolute forces of the two opposing sides of one contradiction."""

    id: ContradictionId
    force_pos: float
    force_neg: float

    def __post_init__(self):
        if not (self.force_pos > 0 and self.force_neg > 0):
            raise ModelViolation(
                f"{self.id.name}: forces must be positive, got "
                f"({self.force_pos}, {self.force_neg})"
            )

    @classmethod
    def from_sharpness(cls, cid: ContradictionId, lam: float, total: float = 1.0):
        """Build a state with the given sharpness and force total."""
        if not -1.0 < lam < 1.0:
            raise ModelViolation(f"{cid.name}: sharpness {lam} outside (-1, 1)")
        pos = max(total * (1.0 + lam) / 2.0, FORCE_FLOOR)
        neg = max(total * (1.0 - lam) / 2.0, FORCE_FLOOR)
        return cls(cid, pos, neg)


def _check(state: ContradictionState):
    if not (state.force_pos > 0 and state.force_neg > 0):
        raise ModelViolation(f"{state.id.name}: non-positive force")


def relative_forces(state: ContradictionState) -> tuple[float, float]:
    _check(state)
    total = state.force_pos + state.force_neg
    pos = state.force_pos / total
    return pos, 1.0 - pos


def sharpness(state: ContradictionState) -> float:
    """Relative-force difference of the two sides, in (-1, 1)."""
    # forces are validated positive at construction and the state is frozen
    pos = state.force_pos / (state.force_pos + state.force_neg)
    return pos - (1.0 - pos)


class ActionKind(str, Enum):
    STRENGTHEN_POS = "strengthen_pos"
    WEAKEN_POS = "weaken_pos"
    STRENGTHEN_NEG = "strengthen_neg"
    WEAKEN_NEG = "weaken_neg"

    @property
    def side(self) -> str:
        return "pos" if self in (ActionKind.STRENGTHEN_POS, ActionKind.WEAKEN_POS) else "neg"

    @property
    def sign(self) -> int:
        return 1 if self in (ActionKind.STRENGTHEN_POS, ActionKind.STRENGTHEN_NEG) else -1

    def inverse(self) -> "ActionKind":
        return _INVERSE[self]


_INVERSE = {
    ActionKind.STRENGTHEN_POS: ActionKind.WEAKEN_POS,
    ActionKind.WEAKEN_POS: ActionKind.STRENGTHEN_POS,
    ActionKind.STRENGTHEN_NEG: ActionKind.WEAKEN_NEG,
    ActionKind.WEAKEN_NEG: ActionKind.STRENGTHEN_NEG,
}


@dataclass(frozen=True)
class Action:
    """One of the four force-moving actions tied to a contradiction.

    ``needs`` names the resources that must be claimed for the action to run.
    """

    kind: ActionKind
    needs: frozenset = frozenset()

    def delta(self, magnitude: float) -> tuple[float, float]:
        d = self.kind.sign * magnitude
        return (d, 0.0) if self.kind.side == "pos" else (0.0, d)


@dataclass(frozen=True)
class ActionQuadruple:
    strengthen_pos: Action = Action(ActionKind.STRENGTHEN_POS)
    weaken_pos: Action = Action(ActionKind.WEAKEN_POS)
    strengthen_neg: Action = Action(ActionKind.STRENGTHEN_NEG)
    weaken_neg: Action = Action(ActionKind.WEAKEN_NEG)

    def __post_init__(self):
        for kind in ActionKind:
            if getattr(self, kind.value).kind is not kind:
                raise ModelViolation(f"slot {kind.value} holds a mismatched action")

    def __getitem__(self, kind: ActionKind | str) -> Action:
        return getattr(self, ActionKind(kind).value)

    @classmethod
    def needing(cls, resources: Iterable[str]) -> "ActionQuadruple":
        needs = frozenset(resources)
        return cls(*(Action(k, needs) for k in ActionKind))


class ImportanceOrder:
    """Strict partial order over contradiction names; ``a > b`` means a matters more."""

    def __init__(self, pairs: Iterable[tuple[str, str]] = ()):
        self._pairs: frozenset[tuple[str, str]] = frozenset()
        self.set(pairs)

    def set(self, pairs: Iterable[tuple[str, str]]):
        pairs = frozenset(pairs)
        closure = _transitive_closure(pairs)
        for a, b in closure:
            if a == b:
                raise ModelViolation(f"importance order has a cycle through {a!r}")
        self._pairs = closure

    def dominates(self, a: str, b: str) -> bool:
        return (a, b) in self._pairs

    def names(self) -> set[str]:
        return {x for pair in self._pairs for x in pair}

    def ranked(self, names: Iterable[str]) -> list[str]:
        """Names sorted so that more important ones come first (stable otherwise)."""
        names = list(names)
        wins = {n: sum(self.dominates(n, m) for m in names) for n in names}
        return sorted(names, key=lambda n: -wins[n])

    @property
    def pairs(self) -> frozenset:
        return self._pairs

    def __eq__(self, other):
        return isinstance(other, ImportanceOrder) and other._pairs == self._pairs

    def __repr__(self):
        return f"ImportanceOrder({sorted(self._pairs)})"


def _transitive_closure(pairs: frozenset) -> frozenset:
    closure = set(pairs)
    while True:
        extra = {(a, d) for a, b in closure for c, d in closure if b == c}
        if extra <= closure:
            return frozenset(closure)
        closure |= extra


@dataclass(frozen=True)
class ResourceNeed:
    kind: str
    max_quantity: float


@dataclass
class Individual:
    """An agent: contradictions, their importance, resource needs, actions,
    observable properties and a utility evaluator.

    ``utility(individual, behavior)`` must return a value in [0, 1]; it is
    scenario supplied and only range-checked here.
    """

    id: Any
    contradictions: tuple[ContradictionState, ...]
    order: ImportanceOrder = field(default_factory=ImportanceOrder)
    resource_needs: tuple[ResourceNeed, ...] = ()
    actions: Mapping[str, ActionQuadruple] = field(default_factory=dict)
    properties: dict = field(default_factory=dict)
    utility: Callable[..., float] | None = None

    def __post_init__(self):
        self.contradictions = tuple(self.contradictions)
        names = [c.id.name for c in self.contradictions]
        if len(set(names)) != len(names):
            raise ModelViolation(f"duplicate contradictions in {names}")
        known = set(names)
        if not self.actions:
            self.actions = {n: ActionQuadruple() for n in names}
        missing = (set(self.actions) | self.order.names()) - known
        if missing:
            raise ModelViolation(f"references to unknown contradictions: {sorted(missing)}")
        if set(self.actions) != known:
            raise ModelViolation("every contradiction needs an action quadruple")

    @property
    def names(self) -> tuple[str, ...]:
        # names never change after construction (with_states checks this)
        cached = self.__dict__.get("_names")
        if cached is None:
            cached = self.__dict__["_names"] = tuple(c.id.name for c in self.contradictions)
        return cached

    def state(self, name: str) -> ContradictionState:
        for c in self.contradictions:
            if c.id.name == name:
                return c
        raise KeyError(name)

    def sharpness(self, name: str) -> float:
        return sharpness(self.state(name))

    def sharpness_vector(self) -> list[float]:
        return [sharpness(c) for c in self.contradictions]

    def evaluate_utility(self, behavior=None) -> float:
        if self.utility is None:
            return 0.0
        value = float(self.utility(self, behavior))
        if not 0.0 <= value <= 1.0:
            raise ModelViolation(f"utility of {self.id!r} returned {value} outside [0, 1]")
        return value

    def with_state(self, state: ContradictionState) -> "Individual":
        name = state.id.name
        if name not in self.names:
            raise KeyError(name)
        return self.with_states(
            tuple(state if c.id.name == name else c for c in self.contradictions))

    def with_states(self, states) -> "Individual":
        """Copy carrying new contradiction states (same names, same order)."""
        states = tuple(states)
        old = self.contradictions
        if len(states) != len(old):
            raise ModelViolation("replacement states must keep names and order")
        for s, o in zip(states, old):
            if s.id is not o.id and s.id.name != o.id.name:
                raise ModelViolation("replacement states must keep names and order")
        # shallow copy without re-running validation
        out = object.__new__(type(self))
        out.__dict__.update(self.__dict__)
        out.contradictions = states
        return out

    def set_order(self, pairs: Iterable[tuple[str, str]]):
        self.order = ImportanceOrder(pairs)


def shifted(state: ContradictionState, d_pos: float, d_neg: float,
            floor: float = FORCE_FLOOR) -> ContradictionState:
    return ContradictionState(
        state.id, max(state.force_pos + d_pos, floor), max(state.force_neg + d_neg, floor)
    )


def apply_action(individual: Individual, contradiction: str, kind: ActionKind | str,
                 claimed_resources: Iterable[str] = (), magnitude: float = 1.0,
                 floor: float = FORCE_FLOOR) -> Individual:
    """Run one action on one contradiction and return the updated individual.

    Raises KeyError for an unknown contradiction and ActionRejected when the
    claimed resources do not cover the action's needs; the input individual is
    never modified.
    """
    if magnitude <= 0:
        raise ValueError("magnitude must be positive")
    state = individual.state(contradiction)
    action = individual.actions[contradiction][kind]
    missing = action.needs - set(claimed_resources)
    if missing:
        raise ActionRejected(f"{contradiction}/{action.kind.value} lacks {sorted(missing)}")
    d_pos, d_neg = action.delta(magnitude)
    return individual.with_state(shifted(state, d_pos, d_neg, floor))


def step_properties(individual: Individual, delta_gamma: Mapping[str, float],
                    dynamics: Callable[..., dict]) -> dict:
    """Advance observable properties from the per-step contradiction change.

    ``dynamics(properties, contradictions, order, delta_gamma)`` is the
    scenario's update rule; it must not mutate its inputs.
    """
    return dynamics(dict(individual.properties), individual.contradictions,
                    individual.order, dict(delta_gamma))


def sharpness_delta(before: Individual, after: Individual) -> dict[str, float]:
    return {
        name: after.sharpness(name) - before.sharpness(name) for name in before.names
    }
