"""Command-line entry point: ``avcoord --approach eb --vehicles 80,100,120 --out res.csv``."""
from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, ExperimentConfig, apply_overrides, read_config_file
from .harness import run_experiment, write_csv
from .network import build_grid

# flag -> dotted config keys it sets
FLAGS = {
    "approach": ["approach"],
    "steps": ["steps"],
    "runs": ["runs"],
    "seed": ["seed"],
    "out": ["out"],
    "jobs": ["jobs"],
    "grid": ["grid"],
    "edge-length": ["edge_length"],
    "route-length": ["route_length"],
    "routes": ["routes"],
    "vmax": ["vmax"],
    "vehicle-length": ["vehicle_length"],
    "min-gap": ["min_gap"],
    "tcross": ["tcross"],
    "approach-radius": ["approach_radius"],
    "wait-threshold": ["wait_threshold"],
    "if": ["eb.if"],
    "df": ["eb.df"],
    "spread": ["eb.spread"],
    "ic": ["eb.ic"],
    "dc": ["eb.dc"],
    "sr": ["eb.sr"],
    "dm": ["eb.dm"],
    "platoon-eps": ["eb.platoon_eps"],
    "cp": ["auction.cp"],
    "mca": ["auction.mca"],
    "enhancement": ["auction.enhancement"],
    "sponsorship": ["auction.sponsorship"],
    "auction-steps": ["auction.auction_steps"],
    "bidding": ["auction.bidding", "dauction.bidding"],
    "budget": ["auction.budget", "dauction.budget"],
    "radius": ["dauction.radius"],
    "skip-absent-head": ["dauction.skip_absent_head"],
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="avcoord",
        description="Simulate intersection coordination strategies on a Manhattan grid "
                    "and write per-run CWT/TWT results as CSV.")
    p.add_argument("--config", metavar="FILE", help="key=value file; flags override it")
    p.add_argument("--vehicles", metavar="N[,N...]",
                   help="vehicles spawned; a comma list runs a sweep")
    for flag in FLAGS:
        p.add_argument(f"--{flag}", dest=flag.replace("-", "_"), metavar="VALUE")
    p.add_argument("--check", action="store_true",
                   help="assert engine invariants after every step (slow)")
    p.add_argument("--trace", metavar="FILE",
                   help="write a per-step vehicle trace of the first run")
    p.add_argument("--dump-grid", action="store_true",
                   help="print the road network as 'from to length' lines and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_args(argv=None):
    """Return ``(config, vehicle sweep, namespace)``; exits with usage on bad input."""
    parser = build_parser()
    args = parser.parse_args(argv)
    values: dict[str, str] = {}
    sweep_text = None
    try:
        if args.config:
            file_values = read_config_file(args.config)
            sweep_text = file_values.pop("vehicles", None)
            values.update(file_values)
        for flag, keys in FLAGS.items():
            raw = getattr(args, flag.replace("-", "_"))
            if raw is not None:
                for key in keys:
                    values[key] = raw
        if args.vehicles is not None:
            sweep_text = args.vehicles
        sweep = [100]
        if sweep_text is not None:
            sweep = [int(x) for x in str(sweep_text).split(",") if x.strip()]
            if not sweep:
                raise ConfigError("--vehicles needs at least one value")
        values["vehicles"] = str(sweep[0])
        cfg = apply_overrides(ExperimentConfig(), values).validate()
        for n in sweep:
            if n < 1:
                raise ConfigError("vehicle counts must be >= 1")
    except (ConfigError, ValueError, OSError) as exc:
        parser.error(str(exc))
    return cfg, sweep, args


def parse_cli(argv=None) -> ExperimentConfig:
    return parse_args(argv)[0]


def main(argv=None) -> int:
    from dataclasses import replace

    cfg, sweep, args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    if args.dump_grid:
        e = cfg.engine
        sys.stdout.write(build_grid(e.width, e.height, e.edge_length).dump())
        return 0
    if args.trace:
        from .harness import simulate
        with open(args.trace, "w", encoding="utf-8") as fh:
            simulate(cfg, cfg.seed, check=args.check, trace=fh)
    results = []
    try:
        for n in sweep:
            results.append(run_experiment(replace(cfg, vehicles=n)))
    except ValueError as exc:
        print(f"avcoord: error: {exc}", file=sys.stderr)
        return 1
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(results, fh)
    else:
        write_csv(results, sys.stdout)
    for res in results:
        st = res.stats
        print(f"{cfg.approach} vs={res.cfg.vehicles}: CWT {st.cwt_mean:.2f} ± {st.cwt_std:.2f}  "
              f"TWT {st.twt_mean:.2f} ± {st.twt_std:.2f}  ({st.n_runs} runs)", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
