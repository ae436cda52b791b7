"""Adam optimizer with bias correction and the mini-batch training loop.

The update follows the canonical description: exponential moving averages
of the gradient and its square, bias-corrected by 1 - beta^t, with
epsilon added outside the square root:

    t' = t + 1
    m' = beta1 * m + (1 - beta1) * g
    v' = beta2 * v + (1 - beta2) * g^2
    theta' = theta - lr * (m' / (1 - beta1^t')) / (sqrt(v' / (1 - beta2^t')) + eps)

``adam_step`` is a pure function; training returns new parameters and
never mutates its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from uat_bench.network import (
    GradientSet,
    NetworkParameters,
    ShapeMismatchError,
    backward,
)
from uat_bench.sampling import Dataset

__all__ = [
    "AdamConfig",
    "AdamState",
    "adam_step",
    "init_state",
    "train_epochs",
]


@dataclass(frozen=True)
class AdamConfig:
    """Adam hyperparameters; defaults are the conventional ones."""

    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError(
                f"beta1 and beta2 must lie in (0, 1), got {self.beta1}, {self.beta2}"
            )
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")


@dataclass(frozen=True)
class AdamState:
    """Step counter and first/second moment accumulators."""

    step_count: int
    first_moment: GradientSet
    second_moment: GradientSet


def init_state(params: NetworkParameters) -> AdamState:
    """Fresh state: zero moments, step_count 0."""
    zeros = lambda: GradientSet(
        layers=tuple((np.zeros_like(W), np.zeros_like(b)) for W, b in params.layers)
    )
    return AdamState(step_count=0, first_moment=zeros(), second_moment=zeros())


def _check_congruent(params: NetworkParameters, grads: GradientSet) -> None:
    if len(params.layers) != len(grads.layers):
        raise ShapeMismatchError(
            f"{len(grads.layers)} gradient layers for {len(params.layers)} parameter layers"
        )
    for i, ((W, b), (gW, gb)) in enumerate(zip(params.layers, grads.layers)):
        if W.shape != gW.shape or b.shape != gb.shape:
            raise ShapeMismatchError(
                f"layer {i}: gradient shapes {gW.shape}/{gb.shape} do not match "
                f"parameter shapes {W.shape}/{b.shape}"
            )


def adam_step(
    params: NetworkParameters,
    state: AdamState,
    grads: GradientSet,
    config: AdamConfig,
) -> tuple[NetworkParameters, AdamState]:
    """One bias-corrected Adam update; returns new (params, state)."""
    _check_congruent(params, grads)
    t = state.step_count + 1
    beta1, beta2 = config.beta1, config.beta2
    bias1 = 1.0 - beta1**t
    bias2 = 1.0 - beta2**t
    lr, eps = config.learning_rate, config.epsilon

    def update(x, g, m, v):
        m_new = beta1 * m + (1.0 - beta1) * g
        v_new = beta2 * v + (1.0 - beta2) * (g * g)
        x_new = x - lr * (m_new / bias1) / (np.sqrt(v_new / bias2) + eps)
        return x_new, m_new, v_new

    new_layers, new_m, new_v = [], [], []
    for (W, b), (gW, gb), (mW, mb), (vW, vb) in zip(
        params.layers, grads.layers, state.first_moment.layers, state.second_moment.layers
    ):
        new_W, new_mW, new_vW = update(W, gW, mW, vW)
        new_b, new_mb, new_vb = update(b, gb, mb, vb)
        new_layers.append((new_W, new_b))
        new_m.append((new_mW, new_mb))
        new_v.append((new_vW, new_vb))
    return (
        NetworkParameters(layers=tuple(new_layers)),
        AdamState(
            step_count=t,
            first_moment=GradientSet(layers=tuple(new_m)),
            second_moment=GradientSet(layers=tuple(new_v)),
        ),
    )


def train_epochs(
    params: NetworkParameters,
    dataset: Dataset,
    config: AdamConfig,
    epochs: int,
    batch_size: int,
    rng: np.random.Generator,
) -> NetworkParameters:
    """Run mini-batch Adam for a number of passes over the dataset.

    Every epoch reshuffles the sample order with ``rng`` and partitions
    it into batches (the last one may be short); one gradient/Adam step
    is taken per batch.  Deterministic given the generator state.
    """
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    inputs = dataset.inputs
    targets = dataset.targets
    n = len(dataset)
    state = init_state(params)
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            grads = backward(params, inputs[batch], targets[batch])
            params, state = adam_step(params, state, grads, config)
    return params
