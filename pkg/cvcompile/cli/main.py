"""
Command-line entry point.

    cvcompile compile --preset compile-kerr --seed 7 --out runs/kerr.csv
    cvcompile nfl --config my_nfl.toml --threads 4
    cvcompile presets

Exit codes: 0 success, 2 configuration error, 3 resource refusal,
1 any other failure. Errors go to stderr as one JSON object.
"""

import argparse
import logging
import sys
from typing import List, Optional

from ..core.config import settings
from ..core.exceptions import ConfigurationError
from ..core.logging import new_run_id, setup_logging
from ..use_cases import USE_CASES
from ..utils.records import render_record, write_record
from .config_loader import (
    apply_overrides,
    build_config,
    list_presets,
    load_preset,
    load_toml,
)
from .error_handler import handle_error

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvcompile",
        description="Variational compiling of continuous-variable unitaries",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("presets", help="List shipped experiment presets")

    for command in USE_CASES:
        run = sub.add_parser(command, help=f"Run a {command} experiment")
        source = run.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", help="Path to a TOML experiment config")
        source.add_argument("--preset", help="Name of a shipped preset")
        run.add_argument("--seed", type=int)
        run.add_argument("--out", help="Record file; stdout when omitted")
        run.add_argument("--threads", type=int)
        run.add_argument("--shots", type=int)
        run.add_argument("--cutoff", type=int)
        run.add_argument(
            "--allow-large",
            action="store_true",
            help="Lift the amplitude budget guard",
        )
    return parser


def _run_experiment(args: argparse.Namespace, run_id: str) -> int:
    data = load_preset(args.preset) if args.preset else load_toml(args.config)
    data = apply_overrides(
        data,
        seed=args.seed,
        output=args.out,
        threads=args.threads,
        shots=args.shots,
        cutoff=args.cutoff,
        allow_large=args.allow_large,
    )
    if "seed" not in data:
        raise ConfigurationError("seed is mandatory: set it in the config or pass --seed")
    config = build_config(data, command=args.command)

    use_case = USE_CASES[args.command](run_id=run_id)
    record = use_case.execute(config)

    if config.output:
        write_record(record, config.output)
    else:
        sys.stdout.write(render_record(record))
    return 0


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    run_id = setup_logging(settings.LOG_LEVEL, new_run_id())
    try:
        if args.command == "presets":
            for name in list_presets():
                print(name)
            return 0
        return _run_experiment(args, run_id)
    except Exception as exc:
        return handle_error(exc, run_id)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
