"""Command-line entry point.

    beamsim run --config FILE --out CSV [--runs K] [--seed S]
                [--mechanisms fss,mass] [--counters] [--bound-report]
                [--workers N]
    beamsim presets list
    beamsim presets dump NAME
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import presets
from .config import ConfigError, OutputOptions, parse_config
from .harness import emit_csv, run_experiment, write_summary
from .stepsize import MECHANISM_KINDS


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamsim",
        description="Blind adaptive CCM beamforming benchmark harness",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="execute one experiment and write CSV output")
    run.add_argument("--config", required=True, help="experiment TOML file")
    run.add_argument("--out", required=True, help="output CSV path (summary goes to <out>.summary)")
    run.add_argument("--runs", type=int, help="override the configured Monte-Carlo run count")
    run.add_argument("--seed", type=int, help="override the configured master seed")
    run.add_argument(
        "--mechanisms",
        help="comma-separated subset of the configured mechanisms to run",
    )
    run.add_argument(
        "--counters",
        action="store_true",
        help="append per-update operation-count columns to the CSV",
    )
    run.add_argument(
        "--bound-report",
        action="store_true",
        help="estimate the stable-step bound 2/|lambda_max| and add it to the summary",
    )
    run.add_argument("--workers", type=int, default=1, help="parallel trial workers")

    preset_cmd = commands.add_parser("presets", help="inspect bundled scenario presets")
    preset_sub = preset_cmd.add_subparsers(dest="preset_command", required=True)
    preset_sub.add_parser("list", help="list bundled preset names")
    dump = preset_sub.add_parser("dump", help="print a preset config to stdout")
    dump.add_argument("name")

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
        return 2
    try:
        spec = parse_config(text)
    except ConfigError as exc:
        print(f"error: {args.config}: {exc}", file=sys.stderr)
        return 2

    scenario = spec.scenario
    overrides = {}
    if args.runs is not None:
        overrides["runs"] = args.runs
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if overrides:
        scenario = dataclasses.replace(scenario, **overrides)

    mechanisms = spec.mechanisms
    if args.mechanisms:
        wanted = [name.strip() for name in args.mechanisms.split(",") if name.strip()]
        unknown = [name for name in wanted if name not in MECHANISM_KINDS]
        if unknown:
            print(
                f"error: unknown mechanism(s) {', '.join(unknown)};"
                f" known: {', '.join(MECHANISM_KINDS)}",
                file=sys.stderr,
            )
            return 2
        configured = {m.kind for m in spec.mechanisms}
        missing = [name for name in wanted if name not in configured]
        if missing:
            print(
                f"error: mechanism(s) {', '.join(missing)} not configured in {args.config}",
                file=sys.stderr,
            )
            return 2
        mechanisms = tuple(m for m in spec.mechanisms if m.kind in wanted)

    if args.workers is not None and args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 2

    spec = dataclasses.replace(
        spec,
        scenario=scenario,
        mechanisms=mechanisms,
        outputs=OutputOptions(
            csv_path=args.out,
            counters=args.counters,
            bound_report=args.bound_report,
            workers=args.workers,
        ),
    )

    result = run_experiment(spec)
    emit_csv(
        result.traces,
        args.out,
        counters=result.counter_totals if args.counters else None,
    )
    write_summary(result, args.out + ".summary")

    for trace in result.traces:
        note = f" ({trace.diverged} diverged)" if trace.diverged else ""
        print(
            f"{spec.scenario_id} {trace.mechanism}: {trace.runs} runs,"
            f" final SINR {trace.sinr_db[-1]:.2f} dB{note}"
        )
    print(f"wrote {args.out} and {args.out}.summary")
    return 0


def _cmd_presets(args: argparse.Namespace) -> int:
    if args.preset_command == "list":
        for name in presets.list_presets():
            print(name)
        return 0
    try:
        sys.stdout.write(presets.preset_text(args.name))
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_presets(args)


if __name__ == "__main__":
    sys.exit(main())
