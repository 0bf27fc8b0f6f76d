"""``simulate`` command: run a Monte Carlo experiment and write CSV/SVG output."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from .bench import PROFILES, SimConfig, aggregate, emit_svg, run_experiment, write_csv
from .errors import ConfigInvalid, TooLarge

log = logging.getLogger("hybrid_precode")

EXIT_CONFIG_INVALID = 2
EXIT_TOO_LARGE = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simulate", description=__doc__)
    p.add_argument("--config", help="JSON file with SimConfig fields (snake_case)")
    p.add_argument("--profile", choices=sorted(PROFILES), default="paper",
                   help="base scenario that the config file overrides (default: paper)")
    p.add_argument("--out", default="results.csv", help="raw per-trial CSV")
    p.add_argument("--agg", help="aggregate CSV (mean/std per SNR and algorithm)")
    p.add_argument("--plot", help="SVG line chart of the aggregate")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--algorithms", help="comma-separated tags, e.g. dg_hp,approx_gs_hp")
    p.add_argument("--threads", type=int, help="worker threads (default: $HYBRID_PRECODE_THREADS)")
    p.add_argument("--timing", action="store_true", help="record wall_time_us per row")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def load_config(args) -> SimConfig:
    cfg = PROFILES[args.profile]()
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigInvalid("config file must hold a JSON object")
        cfg = SimConfig.from_dict(doc, base=cfg)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.algorithms:
        overrides["algorithms"] = tuple(a.strip() for a in args.algorithms.split(",") if a.strip())
    return replace(cfg, **overrides) if overrides else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args)
        log.info("config: %s", json.dumps(cfg.to_dict()))
        rows = run_experiment(cfg, workers=args.threads, timing=args.timing)
    except ConfigInvalid as exc:
        print(f"simulate: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG_INVALID
    except TooLarge as exc:
        print(f"simulate: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE

    write_csv(rows, args.out, kind="raw")
    log.info("wrote %d rows to %s", len(rows), args.out)
    if args.agg or args.plot:
        agg = aggregate(rows)
        if args.agg:
            write_csv(agg, args.agg, kind="aggregate")
        if args.plot:
            emit_svg(agg, args.plot)
    return 0


if __name__ == "__main__":
    sys.exit(main())
