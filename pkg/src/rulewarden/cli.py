"""Command line entry point: `rulewarden <command> ...` or `python -m rulewarden`."""

import argparse
import sys
from pathlib import Path

from loguru import logger

from rulewarden import scripts, utils
from rulewarden.errors import (
    EXIT_CONFIG,
    EXIT_INVARIANT,
    EXIT_IO,
    EXIT_OK,
    ConfigError,
    InvariantViolation,
    RulewardenError,
)
from rulewarden.rulestore import RuleCorpus
from rulewarden.scenarios import ScenarioConfig


def _run(args: argparse.Namespace):
    config = ScenarioConfig.from_file(args.scenario)
    config = config.replace(
        seed=args.seed, output_path=args.output, plot=True if args.plot else None
    )
    output = config.output_path or utils.default_output_dir(config.name)
    artifacts = scripts.run_scenario(config, save_path=output, pbar=args.pbar)
    for trajectory in artifacts.trajectories.values():
        logger.info(
            f"{trajectory.name} ({trajectory.contributor[:12]}): "
            f"{len(trajectory)} validated rules, final T={trajectory.final_T:.4f}"
        )


def _replay(args: argparse.Namespace):
    scripts.replay_log(args.txlog, genesis_path=args.genesis)


def _verify_bounds(args: argparse.Namespace):
    scripts.verify_bounds(args.txlog, genesis_path=args.genesis)


def _audit_store(args: argparse.Namespace):
    scripts.audit_store(args.run_dir)


def _make_corpus(args: argparse.Namespace):
    corpus = RuleCorpus.synthesize(args.valid, args.invalid, seed=args.seed)
    corpus.write(args.directory)
    logger.info(
        f"Wrote {len(corpus.valid)} valid and {len(corpus.invalid)} invalid rules "
        f"to {args.directory}"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rulewarden",
        description="Simulate trust management for collaboratively shared IDS rules.",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log per-transaction detail"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a scenario file")
    run.add_argument("scenario", type=Path)
    run.add_argument("--seed", type=int, help="override the scenario's seed")
    run.add_argument(
        "--output",
        type=Path,
        help=f"output directory (default: ${utils.OUTPUT_DIR_ENV}/<name> or runs/)",
    )
    run.add_argument("--plot", action="store_true", help="also plot trajectories")
    run.add_argument("--pbar", action="store_true", help="show a progress bar")
    run.set_defaults(func=_run)

    for name, func, help in (
        ("replay", _replay, "re-fold a transaction log and check the state"),
        ("verify-bounds", _verify_bounds, "check every recorded trust value"),
    ):
        command = commands.add_parser(name, help=help)
        command.add_argument("txlog", type=Path)
        command.add_argument(
            "--genesis", type=Path, help="genesis file (default: next to the log)"
        )
        command.set_defaults(func=func)

    audit = commands.add_parser("audit-store", help="re-hash every stored bundle")
    audit.add_argument("run_dir", type=Path)
    audit.set_defaults(func=_audit_store)

    corpus = commands.add_parser("make-corpus", help="write a synthetic rule corpus")
    corpus.add_argument("directory", type=Path)
    corpus.add_argument("--valid", type=int, default=100)
    corpus.add_argument("--invalid", type=int, default=100)
    corpus.add_argument("--seed", type=int, default=0)
    corpus.set_defaults(func=_make_corpus)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if args.verbose else "INFO")

    try:
        args.func(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except InvariantViolation as e:
        logger.error(f"Invariant violated: {e}")
        return EXIT_INVARIANT
    except RulewardenError as e:
        # Any other library error means the inputs are inconsistent.
        logger.error(f"Invalid input: {e}")
        return EXIT_INVARIANT
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
