"""Sixty ants find food and agree on how to get it home.

Each ant weighs exploring against following pheromone (its first
contradiction) and keeping clear of others against pushing through a crowd
(its second). Early on the explore/exploit balance is all over the place;
once trails form most ants lean the same way and the order score rises.

    python3 demos/ant_trails.py [steps]
"""

import statistics
import sys

from contraswarm.metrics import bin_sharpness, si_local
from contraswarm.scenarios.ants import AntConfig, Colony


def main(steps: int = 2000, seed: int = 8):
    colony = Colony(AntConfig(units=2000, steps=steps), seed)
    sources = ", ".join(f"{c}" for c in sorted(colony.world.food))
    print(f"Nest at {colony.world.nest}; food at {sources}.")
    window = []
    for step in range(1, steps + 1):
        lam = colony.step()
        window.extend(colony.laden_efficiencies())
        if step % (steps // 8) == 0:
            si = si_local(bin_sharpness(lam[:, 0]))
            eff = statistics.median(window) if window else float("nan")
            w = colony.world
            print(f"step {step:5d}  SI(explore/exploit) {si:5.3f}  "
                  f"median route efficiency {eff:5.3f}  delivered {w.delivered:4d}  "
                  f"carried {colony.laden_count():2d}")
            window = []
    assert colony.conserved()
    print("Every unit picked up is either home or on an ant's back.")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 2000)
