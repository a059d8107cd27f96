# run_workbench.py
import argparse
import sys
from pathlib import Path
from typing import List, Optional

from command_registry import COMMAND_REGISTRY
from workbench.config import RunConfig, load_environment, validate_config
from workbench.errors import InputError, WorkbenchError
from workbench.reports import Outcome, render, verify_report


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kstar", type=int, default=0, help="k(*), the number of branch coordinates minus one")
    common.add_argument("--depth", type=int, help="Truncation depth (default: WORKBENCH_DEPTH or 6)")
    common.add_argument("--seed", type=int, help="Seed for sampled checks (default: WORKBENCH_SEED or 0)")
    common.add_argument("--output", help="Optional path to save the report")
    common.add_argument("--csv", help="Optional path to save the command's table as CSV")

    parser = argparse.ArgumentParser(description="Almost-free workbench CLI")
    parser.add_argument("--verify", help="Re-check the certificate in a saved basis or witness report")
    subparsers = parser.add_subparsers(dest="command")
    for name in sorted(COMMAND_REGISTRY):
        configure, handler = COMMAND_REGISTRY[name]
        configure(subparsers.add_parser(name, parents=[common], help=(handler.__doc__ or "").strip() or None))
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    options = {k: v for k, v in vars(args).items()
               if k not in ("command", "kstar", "depth", "seed", "output", "csv", "verify")}
    config: RunConfig = {"command": args.command, "options": options}
    for key in ("kstar", "depth", "seed", "output", "csv", "verify"):
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    config["inputs"] = [str(v) for k, v in options.items() if k in ("input", "config", "chain", "model") and v]
    return config


def _verify(path: str) -> Outcome:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")
    command, checked = verify_report(text)
    return Outcome(render("verify", [("report", path), ("certificate", command), ("checked", checked)], passed=True))


def run(config: RunConfig) -> int:
    """Dispatch one command; returns the exit code (0 pass, 1 certificate failure, 2 input, 3 depth)."""
    try:
        config = validate_config(config)
        print(f" Seed: {config['seed']}")
        if config.get("verify"):
            outcome = _verify(config["verify"])
        elif config.get("command") in COMMAND_REGISTRY:
            _, handler = COMMAND_REGISTRY[config["command"]]
            outcome = handler(config)
        else:
            raise InputError(f"Unsupported command: {config.get('command')}. Available: {sorted(COMMAND_REGISTRY)}")
    except WorkbenchError as exc:
        print(f" {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code

    for warning in outcome.warnings:
        print(f" Warning: {warning}")
    if config.get("output"):
        Path(config["output"]).write_text(outcome.report, encoding="utf-8")
        print(f" Report saved to {config['output']}")
    else:
        print(outcome.report, end="")
    if config.get("csv"):
        if outcome.table is None:
            print(f" Warning: `{config.get('command')}` has no table to export")
        else:
            outcome.table.to_csv(config["csv"], index=False)
            print(f" Table saved to {config['csv']}")
    elif outcome.table is not None and config.get("output"):
        print(" Table preview:")
        print(outcome.table.head())
    return 0 if outcome.passed else 1


def main(argv: Optional[List[str]] = None) -> int:
    load_environment()
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None and not args.verify:
        parser.print_help()
        return 2
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
