"""Dense ReLU multilayer perceptron with exact backpropagation.

A network of width w and depth d (= number of hidden ReLU layers) on
n-dimensional input is the composition of d + 1 affine maps: the first
maps n -> w, the middle ones w -> w, the last maps w -> 1.  ReLU is
applied after every affine map except the last.  All arithmetic is
float64; forward and backward are pure functions of their arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "GradientSet",
    "NetworkParameters",
    "NetworkSpec",
    "ShapeMismatchError",
    "all_finite",
    "backward",
    "batch_loss",
    "finite_diff_grad",
    "forward",
    "forward_batch",
    "gradient_check",
    "init",
    "load_parameters",
    "save_parameters",
    "spec_of",
]

Layer = tuple[np.ndarray, np.ndarray]

PARAMS_FORMAT_NAME = "uat-bench-network"
PARAMS_FORMAT_VERSION = 1


class ShapeMismatchError(ValueError):
    """Raised when array shapes or batch lengths are inconsistent."""


@dataclass(frozen=True)
class NetworkSpec:
    """Architecture: input dimension, hidden width, number of hidden layers."""

    input_dim: int
    width: int
    depth: int

    def __post_init__(self):
        if self.input_dim < 1 or self.width < 1 or self.depth < 1:
            raise ValueError(
                f"input_dim, width, depth must all be >= 1, got "
                f"({self.input_dim}, {self.width}, {self.depth})"
            )


def _layer_shapes(spec: NetworkSpec) -> list[tuple[int, int]]:
    """(out, in) shape of each affine map, first to last."""
    dims = [spec.input_dim] + [spec.width] * spec.depth + [1]
    return [(dims[i + 1], dims[i]) for i in range(len(dims) - 1)]


@dataclass(frozen=True)
class NetworkParameters:
    """Ordered (weight matrix, bias vector) pairs, one per affine map."""

    layers: tuple[Layer, ...]

    def __post_init__(self):
        if len(self.layers) < 2:
            raise ValueError("a network has at least two affine maps")
        prev_out = None
        for i, (W, b) in enumerate(self.layers):
            if W.ndim != 2 or b.ndim != 1 or b.shape[0] != W.shape[0]:
                raise ShapeMismatchError(
                    f"layer {i}: weight {W.shape} and bias {b.shape} inconsistent"
                )
            if prev_out is not None and W.shape[1] != prev_out:
                raise ShapeMismatchError(
                    f"layer {i}: input size {W.shape[1]} != previous output {prev_out}"
                )
            prev_out = W.shape[0]
        if prev_out != 1:
            raise ShapeMismatchError(f"final layer must map to 1 output, got {prev_out}")


@dataclass(frozen=True)
class GradientSet:
    """Per-parameter gradients, shape-congruent with NetworkParameters."""

    layers: tuple[Layer, ...]


def spec_of(params: NetworkParameters) -> NetworkSpec:
    """Recover the architecture from parameter shapes."""
    first_W = params.layers[0][0]
    return NetworkSpec(
        input_dim=first_W.shape[1],
        width=first_W.shape[0],
        depth=len(params.layers) - 1,
    )


def all_finite(params: NetworkParameters | GradientSet) -> bool:
    """True when every weight and bias entry is finite."""
    return all(
        np.isfinite(W).all() and np.isfinite(b).all() for W, b in params.layers
    )


def init(spec: NetworkSpec, rng: np.random.Generator) -> NetworkParameters:
    """Draw fresh parameters: weights ~ Normal(0, 2/fan_in), biases zero.

    Deterministic given the generator state; layers are drawn first to
    last, weights row-major.
    """
    layers = []
    for out_dim, in_dim in _layer_shapes(spec):
        std = np.sqrt(2.0 / in_dim)
        W = rng.normal(0.0, std, size=(out_dim, in_dim))
        b = np.zeros(out_dim)
        layers.append((W, b))
    return NetworkParameters(layers=tuple(layers))


def _forward_trace(params: NetworkParameters, X: np.ndarray):
    """All pre-activations and activations for a batch; used by backward."""
    activations = [X]
    pre = []
    a = X
    last = len(params.layers) - 1
    for i, (W, b) in enumerate(params.layers):
        z = a @ W.T + b
        pre.append(z)
        if i < last:
            a = np.maximum(z, 0.0)
            activations.append(a)
    return pre, activations


def forward_batch(params: NetworkParameters, inputs) -> np.ndarray:
    """Network outputs for a batch of input points, shape (N,)."""
    X = np.asarray(inputs, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != params.layers[0][0].shape[1]:
        raise ShapeMismatchError(
            f"expected inputs of shape (N, {params.layers[0][0].shape[1]}), got {X.shape}"
        )
    pre, _ = _forward_trace(params, X)
    return pre[-1][:, 0]


def forward(params: NetworkParameters, point) -> float:
    """Network output at a single input point."""
    X = np.asarray(point, dtype=np.float64).reshape(1, -1)
    return float(forward_batch(params, X)[0])


def _as_batch(params: NetworkParameters, inputs, targets):
    X = np.asarray(inputs, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if X.ndim != 2 or t.ndim != 1 or X.shape[0] != t.shape[0]:
        raise ShapeMismatchError(
            f"inputs {X.shape} and targets {t.shape} must be (N, d) and (N,)"
        )
    if X.shape[0] == 0:
        raise ShapeMismatchError("batch must be nonempty")
    if X.shape[1] != params.layers[0][0].shape[1]:
        raise ShapeMismatchError(
            f"inputs have dimension {X.shape[1]}, network expects "
            f"{params.layers[0][0].shape[1]}"
        )
    return X, t


def batch_loss(params: NetworkParameters, inputs, targets) -> float:
    """Mean squared error of the network over a batch."""
    X, t = _as_batch(params, inputs, targets)
    residual = forward_batch(params, X) - t
    return float(np.mean(residual * residual))


def backward(params: NetworkParameters, inputs, targets) -> GradientSet:
    """Exact gradient of :func:`batch_loss` for every parameter.

    The ReLU subgradient at exactly 0 is taken as 0, so gradients are a
    deterministic function of the inputs.
    """
    X, t = _as_batch(params, inputs, targets)
    pre, activations = _forward_trace(params, X)
    n = X.shape[0]
    # d(loss)/d(output), shape (N, 1)
    delta = 2.0 * (pre[-1] - t[:, None]) / n
    grads: list[Layer] = [None] * len(params.layers)  # type: ignore[list-item]
    for i in range(len(params.layers) - 1, -1, -1):
        W, _ = params.layers[i]
        grads[i] = (delta.T @ activations[i], delta.sum(axis=0))
        if i > 0:
            delta = (delta @ W) * (pre[i - 1] > 0.0)
    return GradientSet(layers=tuple(grads))


def finite_diff_grad(params: NetworkParameters, inputs, targets, h: float) -> GradientSet:
    """Central-difference gradient oracle: (loss(p+h) - loss(p-h)) / 2h.

    Perturbs one coordinate at a time; O(P) loss evaluations per
    parameter count P, intended for small test networks only.
    """
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    X, t = _as_batch(params, inputs, targets)
    # Perturb a private copy so the caller's parameters are never touched.
    probe = NetworkParameters(
        layers=tuple((W.copy(), b.copy()) for W, b in params.layers)
    )
    grads = []
    for W, b in probe.layers:
        gW = np.zeros_like(W)
        gb = np.zeros_like(b)
        for arr, g in ((W, gW), (b, gb)):
            flat = arr.ravel()
            gflat = g.ravel()
            for j in range(flat.size):
                orig = flat[j]
                flat[j] = orig + h
                up = batch_loss(probe, X, t)
                flat[j] = orig - h
                down = batch_loss(probe, X, t)
                flat[j] = orig
                gflat[j] = (up - down) / (2.0 * h)
        grads.append((gW, gb))
    return GradientSet(layers=tuple(grads))


def gradient_check(
    n_trials: int = 20,
    seed: int = 2023,
    h: float = 1e-4,
    tolerance_floor: float = 1e-8,
) -> float:
    """Compare backpropagation against central differences on random nets.

    Draws ``n_trials`` random (architecture, parameters, batch) triples
    with width <= 4 and depth <= 3 and returns the worst per-coordinate
    error: relative where |exact| >= ``tolerance_floor``, absolute below
    (tiny gradients cannot be resolved relatively).

    Parameters are put in generic position: weights from the training
    initialization but biases drawn randomly.  Zero biases would pin a
    pre-activation exactly on the ReLU kink whenever the previous layer
    is dead for a sample, and there the one-sided finite difference and
    the exact subgradient (ReLU'(0) = 0) legitimately disagree.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_trials):
        spec = NetworkSpec(
            input_dim=2,
            width=int(rng.integers(1, 5)),
            depth=int(rng.integers(1, 4)),
        )
        params = NetworkParameters(
            layers=tuple(
                (W, rng.normal(0.0, 0.5, size=b.shape))
                for W, b in init(spec, rng).layers
            )
        )
        batch = int(rng.integers(1, 5))
        X = rng.uniform(-2.0, 2.0, size=(batch, 2))
        t = rng.normal(0.0, 1.0, size=batch)
        exact = backward(params, X, t)
        approx = finite_diff_grad(params, X, t, h)
        for (eW, eb), (aW, ab) in zip(exact.layers, approx.layers):
            for e, a in ((eW, aW), (eb, ab)):
                diff = np.abs(a - e)
                large = np.abs(e) >= tolerance_floor
                if large.any():
                    worst = max(worst, float((diff[large] / np.abs(e[large])).max()))
                if (~large).any():
                    worst = max(worst, float(diff[~large].max()))
    return worst


def save_parameters(params: NetworkParameters, path) -> None:
    """Write parameters to a versioned plain-text file.

    Format, line by line::

        uat-bench-network <version>
        input_dim <n>
        width <w>
        depth <d>
        layer <i> weight <rows> <cols>   # then <rows> lines of <cols> numbers
        layer <i> bias <size>            # then one line of <size> numbers
        ...
        end

    Numbers are written with ``repr`` (shortest round-trip), so loading
    reproduces every entry bitwise.
    """
    spec = spec_of(params)
    lines = [
        f"{PARAMS_FORMAT_NAME} {PARAMS_FORMAT_VERSION}",
        f"input_dim {spec.input_dim}",
        f"width {spec.width}",
        f"depth {spec.depth}",
    ]
    for i, (W, b) in enumerate(params.layers):
        lines.append(f"layer {i} weight {W.shape[0]} {W.shape[1]}")
        for row in W:
            lines.append(" ".join(repr(float(v)) for v in row))
        lines.append(f"layer {i} bias {b.shape[0]}")
        lines.append(" ".join(repr(float(v)) for v in b))
    lines.append("end")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_parameters(path) -> NetworkParameters:
    """Read parameters written by :func:`save_parameters`."""
    text = Path(path).read_text(encoding="ascii")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    try:
        return _parse_parameters(lines, path)
    except IndexError:
        raise ValueError(f"truncated parameters file: {path}") from None


def _parse_parameters(lines: list[str], path) -> NetworkParameters:
    header = lines[0].split()
    if len(header) != 2 or header[0] != PARAMS_FORMAT_NAME:
        raise ValueError(f"not a {PARAMS_FORMAT_NAME} file: {path}")
    if int(header[1]) != PARAMS_FORMAT_VERSION:
        raise ValueError(f"unsupported format version {header[1]}")
    fields = {}
    for ln in lines[1:4]:
        key, value = ln.split()
        fields[key] = int(value)
    spec = NetworkSpec(fields["input_dim"], fields["width"], fields["depth"])
    pos = 4
    layers = []
    for i, (out_dim, in_dim) in enumerate(_layer_shapes(spec)):
        if lines[pos].split() != ["layer", str(i), "weight", str(out_dim), str(in_dim)]:
            raise ValueError(f"malformed weight header at line {pos + 1}: {lines[pos]!r}")
        pos += 1
        W = np.array(
            [[float(v) for v in lines[pos + r].split()] for r in range(out_dim)]
        )
        pos += out_dim
        if lines[pos].split() != ["layer", str(i), "bias", str(out_dim)]:
            raise ValueError(f"malformed bias header at line {pos + 1}: {lines[pos]!r}")
        pos += 1
        b = np.array([float(v) for v in lines[pos].split()])
        pos += 1
        if W.shape != (out_dim, in_dim) or b.shape != (out_dim,):
            raise ShapeMismatchError(f"layer {i} data does not match its header")
        layers.append((W, b))
    if lines[pos] != "end":
        raise ValueError("missing end marker")
    params = NetworkParameters(layers=tuple(layers))
    if not all_finite(params):
        raise ValueError("loaded parameters contain non-finite entries")
    return params
