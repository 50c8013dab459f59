"""Command-line entry point: one subcommand per experiment kind.

Exit codes: 0 success, 2 invalid configuration, 3 beyond the simulator's
capability (system too large for the exact oracle).
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import KINDS, ConfigError, defaults, load, validate
from .experiments import default_out, run_experiment
from .statevector import CapabilityError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CAPABILITY = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tetris-syk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="kind", required=True, metavar="EXPERIMENT")
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run the {kind.replace('_', ' ')} experiment")
        p.add_argument("--config", help="YAML config; omitted fields take the kind's defaults")
        p.add_argument("--seed-override", type=int, help="replace seeds.circuits")
        p.add_argument("--workers", type=int, default=1, help="parallel worker processes (default 1)")
        p.add_argument("--out", help="output directory (default: config 'output' or runs/<kind>)")
        p.add_argument("--print-config", action="store_true", help="print the validated config and exit")
        p.add_argument("--quiet", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load(args.config, args.kind) if args.config else validate({}, args.kind)
        if args.seed_override is not None:
            if args.seed_override < 0:
                raise ConfigError("--seed-override", "must be non-negative")
            cfg["seeds"]["circuits"] = args.seed_override
        if args.workers < 1:
            raise ConfigError("--workers", "must be at least 1")
        if args.print_config:
            print(json.dumps(cfg, indent=1))
            return EXIT_OK
        out = args.out or default_out(cfg)
        log = (lambda *_: None) if args.quiet else (lambda m: print(m, file=sys.stderr))
        summary = run_experiment(cfg, out, args.workers, log)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    print(json.dumps(summary, indent=1, sort_keys=True, default=str))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
