"""Inclusive uniform grid sampling and input/target normalization.

Training and test sets are k x k Cartesian grids over a function's
rectangular domain, endpoints included, in row-major order (y varies
fastest).  Normalization maps inputs affinely to [-1, 1]^2 from the
domain bounds and targets to [0, 1] by min-max scaling; the statistics
are kept so test grids can be normalized with training-set statistics
and predictions mapped back to raw units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from uat_bench.functions import Domain, TestFunction

__all__ = [
    "Dataset",
    "DegenerateRangeError",
    "NormStats",
    "build_dataset",
    "denormalize",
    "grid",
    "normalize_inputs",
]


class DegenerateRangeError(ValueError):
    """Raised when a target range with min == max cannot be inverted."""


@dataclass(frozen=True)
class NormStats:
    """Normalization statistics: domain for inputs, min/max for targets."""

    domain: Domain
    target_min: float
    target_max: float
    degenerate: bool = False


@dataclass(frozen=True)
class Dataset:
    """Grid-sampled inputs and targets; norm_stats is None for raw data."""

    inputs: np.ndarray
    targets: np.ndarray
    norm_stats: NormStats | None = None

    def __post_init__(self):
        if self.inputs.ndim != 2 or self.targets.ndim != 1:
            raise ValueError("inputs must be (N, 2) and targets (N,)")
        if len(self.inputs) != len(self.targets) or len(self.inputs) == 0:
            raise ValueError("inputs and targets must be nonempty and equal length")

    def __len__(self) -> int:
        return len(self.targets)


def grid(domain: Domain, k: int) -> np.ndarray:
    """k^2 evenly spaced points covering the domain, endpoints included.

    Row-major order: y varies fastest, so the first k points share
    x = x_min.  Returns an array of shape (k^2, 2).
    """
    if k < 2:
        raise ValueError(f"grid needs k >= 2, got {k}")
    xs = np.linspace(domain.x_min, domain.x_max, k)
    ys = np.linspace(domain.y_min, domain.y_max, k)
    points = np.empty((k * k, 2))
    points[:, 0] = np.repeat(xs, k)
    points[:, 1] = np.tile(ys, k)
    return points


def normalize_inputs(points: np.ndarray, domain: Domain) -> np.ndarray:
    """Map points affinely from the domain rectangle onto [-1, 1]^2."""
    points = np.asarray(points, dtype=np.float64)
    out = np.empty_like(points)
    out[:, 0] = 2.0 * (points[:, 0] - domain.x_min) / (domain.x_max - domain.x_min) - 1.0
    out[:, 1] = 2.0 * (points[:, 1] - domain.y_min) / (domain.y_max - domain.y_min) - 1.0
    return out


def build_dataset(
    f: TestFunction,
    k: int,
    normalize: bool = True,
    stats: NormStats | None = None,
) -> Dataset:
    """Sample f on its k x k domain grid, optionally normalizing.

    With ``normalize`` set and no ``stats``, statistics are computed from
    this grid (targets then span exactly [0, 1] unless the range is
    degenerate, in which case they are all 0 and the stats are flagged).
    Passing ``stats`` normalizes with those statistics instead, e.g. to
    put a test grid in training-set units; such targets may fall slightly
    outside [0, 1].
    """
    if stats is not None and not normalize:
        raise ValueError("stats were supplied but normalize is off")
    points = grid(f.domain, k)
    raw = np.asarray(f(points[:, 0], points[:, 1]), dtype=np.float64)
    if not normalize:
        return Dataset(inputs=points, targets=raw, norm_stats=None)
    if stats is None:
        t_min = float(raw.min())
        t_max = float(raw.max())
        stats = NormStats(
            domain=f.domain,
            target_min=t_min,
            target_max=t_max,
            degenerate=(t_min == t_max),
        )
    inputs = normalize_inputs(points, stats.domain)
    if stats.degenerate:
        targets = np.zeros_like(raw)
    else:
        targets = (raw - stats.target_min) / (stats.target_max - stats.target_min)
    return Dataset(inputs=inputs, targets=targets, norm_stats=stats)


def denormalize(value, norm_stats: NormStats):
    """Map a normalized target value back to raw function units."""
    if norm_stats.degenerate:
        raise DegenerateRangeError(
            "target range was degenerate (min == max); cannot invert"
        )
    return np.asarray(value, dtype=np.float64) * (
        norm_stats.target_max - norm_stats.target_min
    ) + norm_stats.target_min
