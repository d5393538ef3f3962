"""Command-line entry point.

Subcommands mirror the two-phase flow: `synthesize` writes stimuli,
`analyze` computes entropy from existing stimuli, `run` does both, and
`plot` re-renders the figure from an existing results.csv.

Exit codes: 0 success, 2 config error, 3 missing inputs or logits,
4 numeric failure in a cell.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__, harness
from .config import ExperimentConfig, load_config
from .errors import (
    ConfigParseError,
    ConfigValidationError,
    MissingLogitsError,
    RamphoError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING = 3
EXIT_NUMERIC = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rampho",
        description=(
            "Masker synthesis, SNR-sweep mixing, and frame-wise phonetic "
            "entropy analysis."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("synthesize", "build and export the calibrated stimulus grid"),
        ("analyze", "compute entropy over existing stimuli and write CSV/figure"),
        ("run", "synthesize then analyze"),
        ("plot", "re-render the figure from results.csv"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("-c", "--config", required=True, help="experiment config (YAML)")
        cmd.add_argument("--output-dir", help="override output_dir from the config")
        cmd.add_argument("--seed", type=int, help="override every random seed at once")
        cmd.add_argument(
            "--jobs", type=int, default=1, help="parallel analysis workers (default 1)"
        )
    return parser


def _load(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(args.config)
    return config.with_overrides(output_dir=args.output_dir, seed=args.seed)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = _load(args)
        if args.command == "synthesize":
            meta = harness.synthesize(config)
            print(f"wrote {len(meta['cells'])} stimuli under {config.output_dir}")
        elif args.command == "analyze":
            result = harness.analyze(config, jobs=args.jobs)
            print(f"wrote {len(result.rows)} rows to {config.output_dir / 'results.csv'}")
        elif args.command == "run":
            result = harness.run(config, jobs=args.jobs)
            print(f"wrote {len(result.rows)} rows to {config.output_dir / 'results.csv'}")
        else:
            harness.plot_from_csv(config)
            print(f"wrote {config.output_dir / 'figure1.svg'}")
        return EXIT_OK
    except (ConfigParseError, ConfigValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileNotFoundError, MissingLogitsError) as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except RamphoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
