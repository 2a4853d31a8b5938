"""Command line front end: `doilab <subcommand> [--config path] [--seed N] [--out path]`.

Exit codes: 0 success, 2 assertion-experiment violation, 3 config error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import (
    RUNNERS,
    ConfigError,
    ExperimentConfig,
    ViolationError,
    config_from_dict,
    run_all,
    write_outputs,
)

SUBCOMMANDS = [*sorted(RUNNERS), "all"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="doilab", description=__doc__)
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="JSON config file", default=None)
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--out", default=None, help="override output CSV path")
    return parser


def load_config(path: str | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    runner = run_all if args.subcommand == "all" else RUNNERS[args.subcommand]
    try:
        rows = runner(cfg)
    except ViolationError as exc:
        print(f"violation: {exc}", file=sys.stderr)
        print(json.dumps(exc.dump, indent=2, default=str), file=sys.stderr)
        return 2
    path = write_outputs(rows, cfg, args.out)
    print(f"wrote {len(rows)} rows to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
