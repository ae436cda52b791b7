"""Sup-norm approximation benchmark for small dense ReLU networks.

Trains fixed-width, variable-depth ReLU networks on grid samples of
closed-form test surfaces (Ackley, Rosenbrock, Borehole), keeps the best
of many random restarts per (width, depth) cell, and emits plot-ready
whitespace tables of the resulting sup-norm errors.
"""

from uat_bench.functions import Domain, TestFunction, available_functions, lookup
from uat_bench.network import (
    GradientSet,
    NetworkParameters,
    NetworkSpec,
    backward,
    batch_loss,
    finite_diff_grad,
    forward,
    forward_batch,
    init,
)
from uat_bench.optimizer import AdamConfig, AdamState, adam_step, init_state, train_epochs
from uat_bench.sampling import Dataset, NormStats, build_dataset, denormalize, grid
from uat_bench.experiment import (
    CellResult,
    ExperimentConfig,
    SweepResult,
    derive_seed,
    emit_error_table,
    emit_surface,
    run_cell,
    run_sweep,
    sup_error,
)

__version__ = "0.1.0"

__all__ = [
    "AdamConfig",
    "AdamState",
    "CellResult",
    "Dataset",
    "Domain",
    "ExperimentConfig",
    "GradientSet",
    "NetworkParameters",
    "NetworkSpec",
    "NormStats",
    "SweepResult",
    "TestFunction",
    "adam_step",
    "available_functions",
    "backward",
    "batch_loss",
    "build_dataset",
    "denormalize",
    "derive_seed",
    "emit_error_table",
    "emit_surface",
    "finite_diff_grad",
    "forward",
    "forward_batch",
    "grid",
    "init",
    "init_state",
    "lookup",
    "run_cell",
    "run_sweep",
    "sup_error",
    "train_epochs",
]
