"""Command-line front end: one binary, six verbs.

    uat-bench list-functions
    uat-bench sweep   --function ackley [--seed 7] [--out DIR] ...
    uat-bench resume  --config c.json
    uat-bench train   --function rosenbrock --width 4 --depth 6
    uat-bench emit-surface --function borehole [--k 50]
    uat-bench grad-check [--trials 20] [--seed 2023]

Configuration precedence per field: command-line flag, then ``--config``
JSON file, then built-in default.  The output directory additionally
falls back to the ``UAT_BENCH_OUT`` environment variable before the
default ``.``.

Exit status: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from uat_bench.experiment import (
    SWEEP_SURFACE_K,
    CellResult,
    ExperimentConfig,
    config_from_dict,
    emit_error_table,
    emit_surface,
    run_sweep,
    train_best,
)
from uat_bench.functions import available_functions, lookup
from uat_bench.network import gradient_check, save_parameters

__all__ = ["Command", "entrypoint", "main", "parse_args"]

USAGE_EXIT = 1
RUNTIME_EXIT = 2

#: grad-check passes iff the worst relative error is below this.
GRAD_CHECK_THRESHOLD = 1e-5

_CONFIG_VERBS = frozenset({"sweep", "resume", "train", "emit-surface"})


@dataclass(frozen=True)
class Command:
    """A fully validated invocation, ready for :func:`main`."""

    verb: str
    config: ExperimentConfig | None = None
    surface_k: int = SWEEP_SURFACE_K
    trials: int = 20
    check_seed: int = 2023


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; we reserve 2 for
    runtime failures, so route usage errors to status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(token) for token in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        )


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="uat-bench",
        description="Train fixed-width ReLU networks against benchmark "
        "functions and tabulate sup-norm errors over a width x depth sweep.",
    )
    sub = parser.add_subparsers(dest="verb", required=True, metavar="verb")

    common = _Parser(add_help=False)
    common.add_argument(
        "--config", metavar="FILE",
        help="JSON experiment config; explicit flags override its values",
    )
    common.add_argument(
        "--function", choices=list(available_functions()),
        help="benchmark function to approximate",
    )
    common.add_argument(
        "--out", metavar="DIR",
        help="output directory (default: $UAT_BENCH_OUT, else '.')",
    )

    training = _Parser(add_help=False)
    training.add_argument("--seed", type=int, help="master seed (default 0)")
    training.add_argument("--restarts", type=int, help="trainings per cell (default 200)")
    training.add_argument("--epochs", type=int, help="epochs per training (default 400)")
    training.add_argument("--train-k", type=int, help="training grid size per axis (default 320)")
    training.add_argument("--test-k", type=int, help="test grid size per axis (default 1000)")
    training.add_argument("--batch-size", type=int, help="minibatch size (default 1024)")
    training.add_argument(
        "--normalize", action=argparse.BooleanOptionalAction, default=None,
        help="map inputs to [-1,1]^2 and targets to [0,1] (default: on)",
    )

    sweeping = _Parser(add_help=False)
    sweeping.add_argument(
        "--widths", type=_int_list, metavar="LIST",
        help="comma-separated hidden widths (default 1..10)",
    )
    sweeping.add_argument(
        "--depths", type=_int_list, metavar="LIST",
        help="comma-separated hidden depths (default 1..10)",
    )
    sweeping.add_argument(
        "--parallelism", type=int, metavar="N",
        help="max concurrent cells (default: number of processor cores)",
    )

    sub.add_parser(
        "list-functions", parents=[],
        help="print the registered benchmark functions and their domains",
    )
    sub.add_parser(
        "sweep", parents=[common, training, sweeping],
        help="run the full width x depth sweep and emit .dat tables",
    )
    sub.add_parser(
        "resume", parents=[common, training, sweeping],
        help="continue a checkpointed sweep; finished cells are reused",
    )
    train = sub.add_parser(
        "train", parents=[common, training],
        help="train one (width, depth) cell and save the best network",
    )
    train.add_argument("--width", type=int, required=True, help="hidden width")
    train.add_argument("--depth", type=int, required=True, help="hidden depth")
    surface = sub.add_parser(
        "emit-surface", parents=[common],
        help="sample a function on its domain grid and write fig_<name>.dat",
    )
    surface.add_argument(
        "--k", type=int, default=SWEEP_SURFACE_K,
        help=f"grid size per axis (default {SWEEP_SURFACE_K})",
    )
    check = sub.add_parser(
        "grad-check", parents=[],
        help="compare backpropagation against central finite differences",
    )
    check.add_argument("--trials", type=int, default=20, help="random configurations (default 20)")
    check.add_argument("--seed", type=int, default=2023, help="configuration RNG seed (default 2023)")
    return parser


def _config_from_args(args: argparse.Namespace, parser: _Parser) -> ExperimentConfig:
    merged: dict = {}
    if args.config is not None:
        path = Path(args.config)
        try:
            loaded = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            parser.error(f"cannot read config file: {exc}")
        except json.JSONDecodeError as exc:
            parser.error(f"{path}: not valid JSON ({exc})")
        if not isinstance(loaded, dict):
            parser.error(f"{path}: config must be a JSON object")
        merged.update(loaded)

    overrides = {
        "function": getattr(args, "function", None),
        "master_seed": getattr(args, "seed", None),
        "restarts": getattr(args, "restarts", None),
        "epochs": getattr(args, "epochs", None),
        "train_k": getattr(args, "train_k", None),
        "test_k": getattr(args, "test_k", None),
        "batch_size": getattr(args, "batch_size", None),
        "widths": getattr(args, "widths", None),
        "depths": getattr(args, "depths", None),
        "parallelism": getattr(args, "parallelism", None),
        "normalize": getattr(args, "normalize", None),
    }
    if getattr(args, "width", None) is not None:
        overrides["widths"] = [args.width]
    if getattr(args, "depth", None) is not None:
        overrides["depths"] = [args.depth]
    merged.update({k: v for k, v in overrides.items() if v is not None})

    if args.out is not None:
        merged["out_dir"] = args.out
    elif "out_dir" not in merged:
        env_out = os.environ.get("UAT_BENCH_OUT")
        if env_out:
            merged["out_dir"] = env_out

    if "function" not in merged:
        parser.error("--function is required (or supply it via --config)")
    try:
        return config_from_dict(merged)
    except (TypeError, ValueError) as exc:
        parser.error(str(exc))
    raise AssertionError("unreachable")  # parser.error never returns


def parse_args(argv: list[str]) -> Command:
    """Parse and validate; any invalid input exits with usage status 1."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.verb in _CONFIG_VERBS:
        config = _config_from_args(args, parser)
        if args.verb == "emit-surface":
            if args.k < 2:
                parser.error(f"--k must be >= 2, got {args.k}")
            return Command(verb=args.verb, config=config, surface_k=args.k)
        return Command(verb=args.verb, config=config)
    if args.verb == "grad-check":
        if args.trials < 1:
            parser.error(f"--trials must be >= 1, got {args.trials}")
        return Command(verb=args.verb, trials=args.trials, check_seed=args.seed)
    return Command(verb=args.verb)


def _print_cell(function: str, cell: CellResult, from_checkpoint: bool) -> None:
    note = " [checkpoint]" if from_checkpoint else ""
    flagged = f", {len(cell.failed_restarts)} diverged" if cell.failed_restarts else ""
    print(
        f"[{function}] width {cell.width} depth {cell.depth}: "
        f"best error {cell.best_error:.9g} "
        f"(restart {cell.best_restart_index}{flagged}){note}"
    )


def main(command: Command) -> int:
    """Execute a validated Command; returns the process exit status."""
    try:
        if command.verb == "list-functions":
            for name in available_functions():
                d = lookup(name).domain
                print(
                    f"{name}: x in [{d.x_min:g}, {d.x_max:g}], "
                    f"y in [{d.y_min:g}, {d.y_max:g}]"
                )
            return 0

        if command.verb == "grad-check":
            worst = gradient_check(n_trials=command.trials, seed=command.check_seed)
            print(
                f"max relative error {worst:.6g} over {command.trials} "
                f"random configurations"
            )
            if worst < GRAD_CHECK_THRESHOLD:
                return 0
            print(
                f"uat-bench: gradient check failed (threshold "
                f"{GRAD_CHECK_THRESHOLD:g})",
                file=sys.stderr,
            )
            return RUNTIME_EXIT

        config = command.config
        if config is None:
            raise RuntimeError(f"verb {command.verb!r} requires a configuration")
        config.out_dir.mkdir(parents=True, exist_ok=True)

        if command.verb == "emit-surface":
            f = lookup(config.function)
            path = config.out_dir / f"fig_{f.name}.dat"
            emit_surface(f, command.surface_k, path)
            print(f"wrote {path}")
            return 0

        if command.verb == "train":
            f = lookup(config.function)
            width, depth = config.widths[0], config.depths[0]
            result, params = train_best(f, width, depth, config)
            _print_cell(config.function, result, from_checkpoint=False)
            if params is None:
                print(
                    "uat-bench: every restart diverged; no network saved",
                    file=sys.stderr,
                )
                return RUNTIME_EXIT
            path = config.out_dir / f"{config.function}_w{width}_d{depth}.network"
            save_parameters(params, path)
            print(f"wrote {path}")
            return 0

        # sweep / resume
        sweep = run_sweep(
            config,
            resume=(command.verb == "resume"),
            on_cell=lambda cell, cached: _print_cell(config.function, cell, cached),
        )
        table_path = config.out_dir / f"{config.function}.dat"
        emit_error_table(sweep, table_path)
        surface_path = config.out_dir / f"fig_{config.function}.dat"
        emit_surface(lookup(config.function), SWEEP_SURFACE_K, surface_path)
        print(f"wrote {table_path}")
        print(f"wrote {surface_path}")
        return 0
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"uat-bench: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


def entrypoint() -> None:
    sys.exit(main(parse_args(sys.argv[1:])))


if __name__ == "__main__":
    entrypoint()
