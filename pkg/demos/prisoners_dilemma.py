"""Cooperation spreading through a crowd of prisoners.

Each agent keeps an intention that tips it toward cooperating or defecting.
After every round it compares what cooperating and defecting have brought it
(counting what the other choice would have paid) and glances at its
neighbours; the intention moves one notch either way. Larger crowds and
agents free to wander end up cooperating more.

    python3 demos/prisoners_dilemma.py
"""

import statistics

from contraswarm.scenarios.pd import PdConfig, run_pd


def main(seeds=range(5)):
    print("population  mobile  round 1  round 25  round 100   (median of "
          f"{len(seeds)} seeds)")
    for population in (1000, 3000, 5000):
        for mobility in (False, True):
            runs = [run_pd(PdConfig(population=population, mobility=mobility), s)
                    for s in seeds]
            at = [statistics.median(r[k] for r in runs) for k in (0, 24, 99)]
            print(f"{population:10d}  {'yes' if mobility else 'no':>6}  "
                  f"{at[0]:7.3f}  {at[1]:8.3f}  {at[2]:9.3f}")


if __name__ == "__main__":
    main()
