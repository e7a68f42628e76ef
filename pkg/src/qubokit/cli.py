"""Command line entry point: ``bench run`` and ``bench gen-micro``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .harness import RunConfig, SOLVERS, emit, gen_micro_instances, run_benchmark


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="QUBO solver benchmark harness",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="benchmark a solver over instance files")
    run.add_argument("--config", help="JSON config file mirroring RunConfig")
    run.add_argument("--instances", nargs="*", default=None, help="instance paths")
    run.add_argument("--solver", choices=sorted(SOLVERS), default=None)
    run.add_argument("--reps", type=int, default=None, help="runs per instance")
    run.add_argument("--seed", type=int, default=None, help="base seed")
    run.add_argument("--format", choices=("table", "csv", "json"), default=None)
    run.add_argument(
        "--backend",
        default=None,
        help="sampler backend: exact | anneal | remote:<url>",
    )
    run.add_argument("--fraction", type=float, default=None, help="subproblem fraction")
    run.add_argument("--rounds", type=int, default=None, help="decomposition rounds")
    run.add_argument("--iterations", type=int, default=None, help="portfolio iterations")
    run.add_argument("--threads", type=int, default=None, help="thread-pool size")
    run.add_argument("--node-limit", type=int, default=None, help="search node limit")
    run.add_argument("--time-limit", type=float, default=None, help="seconds per run")
    run.add_argument("--out", default=None, help="write output here instead of stdout")
    run.add_argument(
        "--strict",
        action="store_true",
        help="exit nonzero if any instance fails to load",
    )

    gen = sub.add_parser("gen-micro", help="generate the micro benchmark corpus")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True, help="output directory")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    doc: dict = {}
    if args.config:
        doc = json.loads(Path(args.config).read_text())
    if args.instances is not None:
        doc["instances"] = args.instances
    if args.solver is not None:
        doc["solver"] = args.solver
    if args.reps is not None:
        doc["repetitions"] = args.reps
    if args.seed is not None:
        doc["base_seed"] = args.seed
    if args.format is not None:
        doc["output_format"] = args.format
    if args.backend is not None:
        doc["backend"] = args.backend
    if args.strict:
        doc["strict"] = True
    options = dict(doc.get("solver_options", {}))
    for key, value in (
        ("fraction", args.fraction),
        ("rounds", args.rounds),
        ("iterations", args.iterations),
        ("threads", args.threads),
        ("node_limit", args.node_limit),
        ("time_limit_s", args.time_limit),
    ):
        if value is not None:
            options[key] = value
    doc["solver_options"] = options
    if "instances" not in doc or not doc["instances"]:
        raise SystemExit("no instances given (use --instances or --config)")
    if "solver" not in doc:
        raise SystemExit("no solver given (use --solver or --config)")
    return RunConfig.from_dict(doc)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s %(message)s",
    )

    if args.command == "gen-micro":
        manifest = gen_micro_instances(args.seed, args.out)
        print(manifest)
        return 0

    cfg = _run_config(args)
    stats = run_benchmark(cfg)
    text = emit(stats, cfg.output_format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if cfg.strict and any(s.error for s in stats):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
