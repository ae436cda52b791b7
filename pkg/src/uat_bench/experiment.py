"""Width x depth sweep: multi-restart training, sup-norm scoring, emission.

Every (width, depth) cell trains ``restarts`` independent networks, each
seeded from a stable hash of (master_seed, function, width, depth,
restart index), scores each on a dense test grid by the maximum absolute
deviation, and keeps the lowest error.  Completed cells are appended to
a checkpoint file so long sweeps survive interruption and resume to
bitwise-identical results.

Outputs per function:

* ``<name>.dat``        whitespace error table (one row per depth, one
                        ``width_<k>`` column per swept width)
* ``fig_<name>.dat``    raw surface samples for 3-D plotting, scanlines
                        separated by blank lines
* ``<name>.checkpoint`` append-only resume log, one JSON record per line
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

from uat_bench.functions import TestFunction, lookup
from uat_bench.network import NetworkParameters, all_finite, forward_batch, init
from uat_bench.network import NetworkSpec
from uat_bench.optimizer import AdamConfig, train_epochs
from uat_bench.sampling import Dataset, build_dataset, grid

__all__ = [
    "CellResult",
    "CheckpointError",
    "ExperimentConfig",
    "SweepResult",
    "config_from_dict",
    "config_to_dict",
    "derive_seed",
    "emit_error_table",
    "emit_surface",
    "load_error_table",
    "run_cell",
    "run_sweep",
    "sup_error",
]

CHECKPOINT_FORMAT_NAME = "uat-bench-checkpoint"
CHECKPOINT_FORMAT_VERSION = 1

#: Grid resolution of the surface file emitted alongside a sweep.
SWEEP_SURFACE_K = 50


class CheckpointError(RuntimeError):
    """Raised for corrupt checkpoints or config mismatches on resume."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one sweep; every field has a default
    except the function name."""

    function: str
    train_k: int = 320
    test_k: int = 1000
    widths: tuple[int, ...] = tuple(range(1, 11))
    depths: tuple[int, ...] = tuple(range(1, 11))
    restarts: int = 200
    adam: AdamConfig = AdamConfig()
    epochs: int = 400
    batch_size: int = 1024
    master_seed: int = 0
    normalize: bool = True
    out_dir: Path = Path(".")
    parallelism: int | None = None

    def __post_init__(self):
        lookup(self.function)  # fail fast on unknown names
        if self.train_k < 2 or self.test_k < 2:
            raise ValueError("train_k and test_k must be >= 2")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        for name, values in (("widths", self.widths), ("depths", self.depths)):
            if not values or any(v < 1 for v in values):
                raise ValueError(f"{name} must be nonempty with all entries >= 1")
            if len(set(values)) != len(values):
                raise ValueError(f"{name} must not contain duplicates")
        if self.parallelism is not None and self.parallelism < 1:
            raise ValueError(f"parallelism must be >= 1, got {self.parallelism}")
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        object.__setattr__(self, "depths", tuple(int(d) for d in self.depths))
        object.__setattr__(self, "out_dir", Path(self.out_dir))


@dataclass(frozen=True)
class CellResult:
    """Best-of-restarts outcome for one (width, depth) cell."""

    width: int
    depth: int
    best_error: float
    best_restart_index: int
    per_restart_errors: tuple[float, ...]
    failed_restarts: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.per_restart_errors:
            raise ValueError("per_restart_errors must be nonempty")
        best = min(self.per_restart_errors)
        if self.best_error != best:
            raise ValueError(
                f"best_error {self.best_error} != min(per_restart_errors) {best}"
            )
        if self.best_restart_index != self.per_restart_errors.index(best):
            raise ValueError("best_restart_index must be the first index at the minimum")


@dataclass(frozen=True)
class SweepResult:
    """All cell results for one function, plus the config that made them."""

    function: str
    config: ExperimentConfig
    cells: tuple[CellResult, ...]

    def __post_init__(self):
        keys = {(c.width, c.depth) for c in self.cells}
        expected = {(w, d) for w in self.config.widths for d in self.config.depths}
        if keys != expected or len(self.cells) != len(expected):
            raise ValueError("cells must cover the width x depth product exactly once")

    def cell(self, width: int, depth: int) -> CellResult:
        for c in self.cells:
            if c.width == width and c.depth == depth:
                return c
        raise KeyError((width, depth))


def derive_seed(
    master_seed: int, function: str, width: int, depth: int, restart_index: int
) -> int:
    """Stable 64-bit seed for one restart.

    SHA-256 of the ASCII string "master|function|width|depth|restart",
    first 8 digest bytes interpreted big-endian.  Platform-independent
    and collision-free for all practical tuple sets.
    """
    key = f"{master_seed}|{function}|{width}|{depth}|{restart_index}"
    digest = hashlib.sha256(key.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def sup_error(params: NetworkParameters, test_inputs, test_targets) -> float:
    """Maximum absolute deviation of the network from the targets."""
    inputs = np.asarray(test_inputs, dtype=np.float64)
    targets = np.asarray(test_targets, dtype=np.float64)
    if len(inputs) == 0 or len(inputs) != len(targets):
        raise ValueError("test inputs and targets must be nonempty and equal length")
    return float(np.max(np.abs(forward_batch(params, inputs) - targets)))


@lru_cache(maxsize=8)
def _datasets_for(
    function: str, train_k: int, test_k: int, normalize: bool
) -> tuple[Dataset, Dataset]:
    """Training and test grids for a registered function.

    The test grid is normalized with the training grid's statistics, so
    errors are in training-set units.  Cached per process: the test grid
    is the expensive part (test_k^2 evaluations).
    """
    f = lookup(function)
    train = build_dataset(f, train_k, normalize=normalize)
    test = build_dataset(f, test_k, normalize=normalize, stats=train.norm_stats)
    return train, test


def _train_restart(
    f: TestFunction,
    width: int,
    depth: int,
    restart_index: int,
    config: ExperimentConfig,
    train: Dataset,
    test: Dataset,
) -> tuple[float, NetworkParameters | None]:
    """One seeded training run; (+inf, None) when training diverged."""
    seed = derive_seed(config.master_seed, f.name, width, depth, restart_index)
    rng = np.random.default_rng(seed)
    params = init(NetworkSpec(input_dim=2, width=width, depth=depth), rng)
    params = train_epochs(
        params, train, config.adam, config.epochs, config.batch_size, rng
    )
    if not all_finite(params):
        return math.inf, None
    error = sup_error(params, test.inputs, test.targets)
    if not math.isfinite(error):
        return math.inf, None
    return error, params


def _run_cell(
    f: TestFunction,
    width: int,
    depth: int,
    config: ExperimentConfig,
    keep_params: bool,
) -> tuple[CellResult, NetworkParameters | None]:
    if f.name == config.function:
        train, test = _datasets_for(
            f.name, config.train_k, config.test_k, config.normalize
        )
    else:  # unregistered or mismatched function: build without caching
        train = build_dataset(f, config.train_k, normalize=config.normalize)
        test = build_dataset(f, config.test_k, normalize=config.normalize,
                             stats=train.norm_stats)
    errors: list[float] = []
    failed: list[int] = []
    best_params: NetworkParameters | None = None
    best_error = math.inf
    for r in range(config.restarts):
        error, params = _train_restart(f, width, depth, r, config, train, test)
        errors.append(error)
        if params is None:
            failed.append(r)
        elif keep_params and error < best_error:
            best_params = params
        best_error = min(best_error, error)
    best = min(errors)
    result = CellResult(
        width=width,
        depth=depth,
        best_error=best,
        best_restart_index=errors.index(best),
        per_restart_errors=tuple(errors),
        failed_restarts=tuple(failed),
    )
    return result, best_params


def run_cell(
    f: TestFunction, width: int, depth: int, config: ExperimentConfig
) -> CellResult:
    """Train ``config.restarts`` seeded networks for one cell and keep
    the lowest test-grid sup error (first index wins ties)."""
    result, _ = _run_cell(f, width, depth, config, keep_params=False)
    return result


def train_best(
    f: TestFunction, width: int, depth: int, config: ExperimentConfig
) -> tuple[CellResult, NetworkParameters | None]:
    """Like :func:`run_cell` but also returns the best network found
    (None when every restart diverged)."""
    return _run_cell(f, width, depth, config, keep_params=True)


# --- checkpointing -------------------------------------------------------

#: Config fields that determine sweep results; out_dir and parallelism
#: affect only where/how fast results are produced.
_RESULT_FIELDS = (
    "function",
    "train_k",
    "test_k",
    "widths",
    "depths",
    "restarts",
    "epochs",
    "batch_size",
    "master_seed",
    "normalize",
)


def config_to_dict(config: ExperimentConfig) -> dict:
    """JSON-ready dict with exactly the config fields."""
    return {
        "function": config.function,
        "train_k": config.train_k,
        "test_k": config.test_k,
        "widths": list(config.widths),
        "depths": list(config.depths),
        "restarts": config.restarts,
        "adam": {
            "learning_rate": config.adam.learning_rate,
            "beta1": config.adam.beta1,
            "beta2": config.adam.beta2,
            "epsilon": config.adam.epsilon,
        },
        "epochs": config.epochs,
        "batch_size": config.batch_size,
        "master_seed": config.master_seed,
        "normalize": config.normalize,
        "out_dir": str(config.out_dir),
        "parallelism": config.parallelism,
    }


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from a JSON document; unknown keys are rejected."""
    known = set(config_to_dict(ExperimentConfig(function="ackley")))
    extra = set(data) - known
    if extra:
        raise ValueError(f"unknown config fields: {sorted(extra)}")
    if "function" not in data:
        raise ValueError("config requires a 'function' field")
    kwargs = dict(data)
    if "adam" in kwargs:
        adam = kwargs.pop("adam")
        extra_adam = set(adam) - {"learning_rate", "beta1", "beta2", "epsilon"}
        if extra_adam:
            raise ValueError(f"unknown adam fields: {sorted(extra_adam)}")
        kwargs["adam"] = AdamConfig(**adam)
    for key in ("widths", "depths"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    if "out_dir" in kwargs:
        kwargs["out_dir"] = Path(kwargs["out_dir"])
    return ExperimentConfig(**kwargs)


def _result_snapshot(config: ExperimentConfig) -> dict:
    full = config_to_dict(config)
    snap = {k: full[k] for k in _RESULT_FIELDS}
    snap["adam"] = full["adam"]
    return snap


def checkpoint_path(config: ExperimentConfig) -> Path:
    return config.out_dir / f"{config.function}.checkpoint"


def _cell_to_record(function: str, cell: CellResult) -> dict:
    return {
        "record": "cell",
        "function": function,
        "width": cell.width,
        "depth": cell.depth,
        "best_error": cell.best_error,
        "best_restart_index": cell.best_restart_index,
        "per_restart_errors": list(cell.per_restart_errors),
        "failed_restarts": list(cell.failed_restarts),
    }


def _cell_from_record(record: dict) -> CellResult:
    return CellResult(
        width=int(record["width"]),
        depth=int(record["depth"]),
        best_error=float(record["best_error"]),
        best_restart_index=int(record["best_restart_index"]),
        per_restart_errors=tuple(float(e) for e in record["per_restart_errors"]),
        failed_restarts=tuple(int(i) for i in record.get("failed_restarts", [])),
    )


def _read_checkpoint(path: Path) -> tuple[dict | None, dict[tuple[int, int], CellResult]]:
    """Header snapshot and completed cells from a checkpoint file.

    A trailing partial line (interrupted append) is ignored; corruption
    anywhere else raises :class:`CheckpointError`.
    """
    if not path.exists():
        return None, {}
    lines = path.read_text(encoding="utf-8").splitlines()
    header: dict | None = None
    cells: dict[tuple[int, int], CellResult] = {}
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            if i == len(lines) - 1:
                break  # partial final append from a killed run
            raise CheckpointError(f"{path}: corrupt record on line {i + 1}")
        if record.get("record") == "header":
            if record.get("format") != CHECKPOINT_FORMAT_NAME:
                raise CheckpointError(f"{path}: not a {CHECKPOINT_FORMAT_NAME} file")
            if record.get("version") != CHECKPOINT_FORMAT_VERSION:
                raise CheckpointError(
                    f"{path}: unsupported version {record.get('version')}"
                )
            header = record
        elif record.get("record") == "cell":
            cell = _cell_from_record(record)
            cells[(cell.width, cell.depth)] = cell
        else:
            raise CheckpointError(f"{path}: unknown record type on line {i + 1}")
    return header, cells


def _append_record(path: Path, record: dict) -> None:
    line = json.dumps(record, sort_keys=True) + "\n"
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line)
        fh.flush()
        os.fsync(fh.fileno())


# --- sweep ---------------------------------------------------------------


def _run_cell_task(config: ExperimentConfig, width: int, depth: int) -> CellResult:
    """Process-pool entry point; must be picklable and self-contained."""
    return run_cell(lookup(config.function), width, depth, config)


def run_sweep(
    config: ExperimentConfig,
    resume: bool = False,
    on_cell: Callable[[CellResult, bool], None] | None = None,
) -> SweepResult:
    """Run every (width, depth) cell of the sweep, checkpointing each.

    With ``resume`` set, cells already present in the checkpoint are
    reused; otherwise an existing checkpoint with completed cells is an
    error (deleting results implicitly would be destructive).  Results
    are independent of execution order and parallelism because every
    restart derives its own seed.  ``on_cell(result, from_checkpoint)``
    is invoked once per cell as it completes.
    """
    config.out_dir.mkdir(parents=True, exist_ok=True)
    path = checkpoint_path(config)
    header, done = _read_checkpoint(path)
    snapshot = _result_snapshot(config)
    if header is not None and header["config"] != snapshot:
        raise CheckpointError(
            f"{path}: checkpoint was written by a different configuration; "
            "refusing to mix results"
        )
    if done and not resume:
        raise CheckpointError(
            f"{path}: checkpoint already holds {len(done)} completed cells; "
            "use resume to continue or remove the file to start over"
        )
    if header is None:
        _append_record(
            path,
            {
                "record": "header",
                "format": CHECKPOINT_FORMAT_NAME,
                "version": CHECKPOINT_FORMAT_VERSION,
                "config": snapshot,
            },
        )

    order = [(w, d) for w in config.widths for d in config.depths]
    results: dict[tuple[int, int], CellResult] = {}
    pending: list[tuple[int, int]] = []
    for key in order:
        if key in done:
            results[key] = done[key]
            if on_cell is not None:
                on_cell(done[key], True)
        else:
            pending.append(key)

    workers = config.parallelism if config.parallelism is not None else os.cpu_count() or 1
    workers = max(1, min(workers, len(pending) or 1))
    f = lookup(config.function)

    def record(cell: CellResult) -> None:
        results[(cell.width, cell.depth)] = cell
        _append_record(path, _cell_to_record(config.function, cell))
        if on_cell is not None:
            on_cell(cell, False)

    if pending and workers == 1:
        for width, depth in pending:
            record(run_cell(f, width, depth, config))
    elif pending:
        # Warm the dataset cache before forking so workers share the grids.
        _datasets_for(config.function, config.train_k, config.test_k, config.normalize)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_run_cell_task, config, width, depth): (width, depth)
                for width, depth in pending
            }
            remaining = set(futures)
            while remaining:
                finished, remaining = wait(remaining, return_when=FIRST_COMPLETED)
                for fut in finished:
                    record(fut.result())

    cells = tuple(results[key] for key in sorted(results))
    return SweepResult(function=config.function, config=config, cells=cells)


# --- emission ------------------------------------------------------------


def _fmt(value: float) -> str:
    """9 significant digits, trailing zeros trimmed (so 0.5 stays '0.5')."""
    return f"{value:.9g}"


def emit_error_table(sweep: SweepResult, path) -> None:
    """Write the error table: header ``depth width_<w>...``, one row per
    depth ascending, errors at 9 significant digits."""
    widths = sorted(sweep.config.widths)
    depths = sorted(sweep.config.depths)
    lines = ["depth " + " ".join(f"width_{w}" for w in widths)]
    for d in depths:
        row = [str(d)] + [_fmt(sweep.cell(w, d).best_error) for w in widths]
        lines.append(" ".join(row))
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def load_error_table(path) -> tuple[list[int], dict[str, list[float]]]:
    """Parse a file written by :func:`emit_error_table`.

    Returns (depths, columns) where columns maps each header name except
    ``depth`` to its error series.
    """
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines or lines[0].split()[:1] != ["depth"]:
        raise ValueError(f"{path}: missing 'depth ...' header line")
    names = lines[0].split()[1:]
    depths: list[int] = []
    columns: dict[str, list[float]] = {name: [] for name in names}
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        tokens = line.split()
        if len(tokens) != len(names) + 1:
            raise ValueError(
                f"{path}: line {i} has {len(tokens)} columns, expected {len(names) + 1}"
            )
        depths.append(int(tokens[0]))
        for name, tok in zip(names, tokens[1:]):
            columns[name].append(float(tok))
    return depths, columns


def emit_surface(f: TestFunction, k: int, path) -> None:
    """Write raw ``x y f(x,y)`` samples over the k x k domain grid.

    Rows follow grid order; a blank line separates consecutive constant-x
    scanlines (the usual matrix-surface plotting convention).
    """
    points = grid(f.domain, k)
    values = np.asarray(f(points[:, 0], points[:, 1]), dtype=np.float64)
    chunks = []
    for i in range(k):
        block = points[i * k : (i + 1) * k]
        vals = values[i * k : (i + 1) * k]
        chunks.append(
            "\n".join(
                f"{_fmt(x)} {_fmt(y)} {_fmt(v)}"
                for (x, y), v in zip(block, vals)
            )
        )
    _atomic_write(Path(path), "\n\n".join(chunks) + "\n")


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="ascii", newline="\n")
    os.replace(tmp, path)
