"""Command line front end.

Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .config import ConfigError, ExperimentConfig, load_config
from .harness import (
    derive_seed,
    export_line_status,
    run_diffusion_experiment,
    run_end_to_end,
    run_grid_sweep,
    write_grid_artifacts,
    city_for,
)
from .grid import save_city
from .social_graph import generate_scale_free, save_edge_list


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems are configuration errors: exit 1, not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gridspread",
                     description="Simulate a fake-discount attack: influence "
                                 "spread over a social network, shifted demand, "
                                 "and feeder overload cascades.")
    sub = parser.add_subparsers(dest="command", metavar="<command>",
                                parser_class=_Parser)
    sub.required = True

    def add(name: str, help_: str):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, metavar="<path>",
                       help="experiment config file")
        p.add_argument("--seed", type=int, metavar="<u64>",
                       help="override the master seed")
        p.add_argument("--out", metavar="<dir>", help="override the output dir")
        p.add_argument("--threads", type=int, default=1, metavar="<n>",
                       help="worker processes (default 1)")
        return p

    add("gen-network", "write one synthetic social network as an edge list")
    add("gen-city", "write the synthetic city geometry as JSON")
    add("build-grid", "write the feeder line topology CSV")
    add("diffuse", "run the influence-spread experiment, write trace CSVs")
    add("sweep", "run the blackout sweep over follow and EV rates")
    add("end-to-end", "diffusion peak rates feeding the blackout sweep")

    exp = add("export-lines", "simulate one cell and write per-line status")
    exp.add_argument("--follow-rate", type=float, metavar="<r>",
                     help="follow-through rate (default: highest configured)")
    exp.add_argument("--ev-rate", type=float, metavar="<r>",
                     help="EV adoption rate (default: highest configured)")
    exp.add_argument("--trial", type=int, default=0, metavar="<t>",
                     help="trial index for seeding (default 0)")
    return parser


def _effective(cfg: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        updates["master_seed"] = args.seed
    if args.out is not None:
        updates["output_dir"] = args.out
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _dispatch(args) -> None:
    cfg = _effective(load_config(args.config), args)
    out = Path(cfg.output_dir)

    if args.command == "gen-network":
        dcfg = cfg.require_diffusion()
        net = generate_scale_free(dcfg.n_nodes, dcfg.attachment,
                                  derive_seed(cfg.master_seed, "network", 0))
        out.mkdir(parents=True, exist_ok=True)
        path = out / "edges.csv"
        save_edge_list(net, path)
        print(f"wrote {path} ({net.n} nodes, {net.edge_count} edges)")
    elif args.command == "gen-city":
        city = city_for(cfg)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "city.json"
        save_city(city, path)
        print(f"wrote {path} ({len(city.buildings)} buildings, "
              f"{len(city.substations)} substations)")
    elif args.command == "build-grid":
        path = write_grid_artifacts(cfg)
        print(f"wrote {path}")
    elif args.command == "diffuse":
        result = run_diffusion_experiment(cfg, threads=args.threads)
        for path in result.paths.values():
            print(f"wrote {path}")
    elif args.command == "sweep":
        result = run_grid_sweep(cfg, threads=args.threads)
        for path in result.paths.values():
            print(f"wrote {path}")
    elif args.command == "end-to-end":
        diff, sweep = run_end_to_end(cfg, threads=args.threads)
        for path in list(diff.paths.values()) + list(sweep.paths.values()):
            print(f"wrote {path}")
    elif args.command == "export-lines":
        path = export_line_status(cfg, follow_rate=args.follow_rate,
                                  ev_rate=args.ev_rate, trial=args.trial)
        print(f"wrote {path}")
    else:  # pragma: no cover - argparse enforces the choices
        raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    try:
        _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
