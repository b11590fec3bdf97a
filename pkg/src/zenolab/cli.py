"""Command-line entry point.

Subcommands: ``run`` (execute a JSON config, write CSV + sidecar, optionally
render figures), ``validate`` (check a config and print the normalized
form), ``list-models``, ``version``, and ``report`` (re-render figures from
existing output files).  Exit codes: 0 success, 1 validation error,
2 runtime error.  Diagnostics go to stderr; run data goes to files only.
"""

from __future__ import annotations

import argparse
import json
import sys

from ._version import __version__
from .harness import ConfigError, load_config, output_basename, run_experiment
from .operators import model_library, model_names

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zenolab",
        description="Product-formula evolution experiments: sweeps, rates, limit studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config and write its outputs")
    run.add_argument("config", help="path to a JSON experiment config")
    run.add_argument("--workers", type=int, default=1, help="concurrent sweep-point workers")
    run.add_argument(
        "--figures", action="store_true", help="also render a PNG next to the data files"
    )

    validate = sub.add_parser("validate", help="validate a config and print the normalized form")
    validate.add_argument("config", help="path to a JSON experiment config")

    sub.add_parser("list-models", help="list the model registry")
    sub.add_parser("version", help="print the library version")

    report = sub.add_parser("report", help="render figures from existing run outputs")
    report.add_argument("output", help="output prefix or CSV/JSON path of a previous run")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.workers < 1:
        raise ConfigError(f"--workers: must be >= 1, got {args.workers}")
    result = run_experiment(config, workers=args.workers)
    base = output_basename(config)
    if config.output_format == "csv":
        print(f"wrote {base.with_suffix('.csv')} and {base.with_suffix('.json')}", file=sys.stderr)
    else:
        print(f"wrote {base.with_suffix('.json')}", file=sys.stderr)
    if result.fit is not None:
        print(
            f"fitted slope {result.fit.slope:+.4f} on {result.fit_on} "
            f"({result.fit.n_points} points, residual {result.fit.residual:.2e})",
            file=sys.stderr,
        )
    elif result.fit_message:
        print(f"no fitted slope: {result.fit_message}", file=sys.stderr)
    if args.figures:
        from . import plots

        figure = plots.render_result(result, base)
        print(f"wrote {figure}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = load_config(args.config)
    print(json.dumps(config.normalized(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_list_models(_args) -> int:
    for name in model_names():
        dim = {"qubit-sx-pz": 2, "qubit-sx-scz": 2, "three-level-block": 3}.get(name, 8)
        model = model_library(name, dim, 0)
        fixed = " (fixed dim)" if name not in ("random-split", "kicked-floquet") else ""
        print(f"{name:20s} {model.description}{fixed}")
    return EXIT_OK


def _cmd_version(_args) -> int:
    print(__version__)
    return EXIT_OK


def _cmd_report(args) -> int:
    from . import plots

    try:
        figure = plots.render_from_files(args.output)
    except FileNotFoundError as exc:
        raise ConfigError(f"output: {exc}") from exc
    print(f"wrote {figure}", file=sys.stderr)
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "validate": _cmd_validate,
    "list-models": _cmd_list_models,
    "version": _cmd_version,
    "report": _cmd_report,
}


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors; map those to validation
        return EXIT_VALIDATION if exc.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
