"""``contraswarm run|sweep|plot``.

Exit status: 0 on success, 2 for a bad config, bad arguments or a metric the
input does not hold, 1 when the run itself fails.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import runner
from .plot import PlotError, plot
from .scenarios import ConfigError

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < runner.SEED_LIMIT:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contraswarm",
        description="Contradiction-driven swarm simulations: ants, geese, prisoner's dilemma.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one seeded run -> metrics.csv and summary.json")
    p.add_argument("--config", required=True, help="INI run config")
    p.add_argument("--seed", type=_seed, help="overrides [run] seed")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("sweep", help="replicated runs over one varied setting")
    p.add_argument("--config", required=True)
    p.add_argument("--vary", required=True, help="setting=v1,v2,... e.g. pd.population=1000,3000")
    p.add_argument("--replicates", type=_positive, default=1)
    p.add_argument("--seed", type=_seed, help="base seed; replicate r uses base + r")
    p.add_argument("--out", required=True)

    p = sub.add_parser("plot", help="SVG line chart of one metric")
    p.add_argument("--in", dest="csv", required=True, help="metrics.csv or medians.csv")
    p.add_argument("--metric", required=True)
    p.add_argument("--out", required=True, help="SVG file to write")
    return parser


def _dispatch(args) -> None:
    if args.command == "plot":
        plot(args.csv, args.metric, args.out)
        return
    cfg = runner.load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    if args.command == "run":
        result = runner.run(cfg, args.out)
        logging.info("%s: %d steps written to %s", result.run_id, result.steps, args.out)
    else:
        param, values = runner.parse_vary(cfg, args.vary)
        runner.sweep(cfg, param, values, args.replicates, args.out)
        logging.info("%d runs written to %s", len(values) * args.replicates, args.out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits with 2 on bad arguments
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        _dispatch(args)
    except (ConfigError, PlotError) as exc:  # the request itself is wrong
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # anything else is a failed run, reported not raised
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
