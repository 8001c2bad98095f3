"""A scattered flock of twelve geese settles into a staggered line.

Every follower judges two things against the bird ahead of it: how far back
it flies and how far to the side. Each is a contradiction whose sharpness is
the normalised error from the comfortable spacing. Watch the joint entropy of
those sharpness values fall as the flock sorts itself out.

    python3 demos/geese_formation.py
"""

import numpy as np

from contraswarm.metrics import joint_entropy_of, si_global_of
from contraswarm.scenarios.geese import Flock, GooseConfig


def describe(flock, step):
    lam = flock.sharpness()
    gaps = np.abs(lam[:, 0]).mean()
    print(f"step {step:5d}  joint entropy {joint_entropy_of(lam):5.3f}  "
          f"order {si_global_of(lam):5.3f}  mean |gap error| {gaps:5.3f}")


def main(seed: int = 1):
    flock = Flock(GooseConfig(flock=12, steps=2000), seed)
    print("Twelve geese released at random over an 80 x 30 patch of sky.")
    describe(flock, 0)
    for step in range(1, 2001):
        flock.step()
        if step in (50, 200, 500, 1000, 2000):
            describe(flock, step)
    snap = flock.snapshot()
    order = np.argsort(snap["x"])[::-1]
    print("\nFinal line, front to back (x ahead, y sideways):")
    for i in order:
        print(f"  goose {i:2d}  x {snap['x'][i]:9.2f}  y {snap['y'][i]:7.2f}  "
              f"speed {snap['speed'][i]:.3f}")


if __name__ == "__main__":
    main()
