"""Swarm models in which every agent's behaviour comes from the struggle between
the two sides of its internal contradictions.

The core pieces are re-exported here; scenarios live in
:mod:`contraswarm.scenarios` and the experiment runner in
:mod:`contraswarm.runner`.
"""

from .behavior import (InteractionContext, PotentialPolicy, apply_behavior, next_states,
                       select_in_swarm, select_isolated, select_with_potential)
from .contradiction import (ActionKind, ContradictionId, ContradictionState, ImportanceOrder,
                            Individual, ModelViolation, sharpness)
from .game import Game2x2, admissible_pairs, equilibrium, mixed_nash, pure_nash
from .metrics import (BinnedDistribution, bin_sharpness, entropy, joint_entropy_of,
                      si_global_of, si_local, swarm_potential)

__version__ = "0.1.0"

__all__ = [
    "ActionKind", "BinnedDistribution", "ContradictionId", "ContradictionState", "Game2x2",
    "ImportanceOrder", "Individual", "InteractionContext", "ModelViolation", "PotentialPolicy",
    "admissible_pairs", "apply_behavior", "bin_sharpness", "entropy", "equilibrium",
    "joint_entropy_of", "mixed_nash", "next_states", "pure_nash", "select_in_swarm",
    "select_isolated", "select_with_potential", "sharpness", "si_global_of", "si_local",
    "swarm_potential",
]
