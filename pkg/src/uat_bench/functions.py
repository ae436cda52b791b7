"""Closed-form benchmark surfaces: Ackley, Rosenbrock, and Borehole.

Each function is a scalar map of two real variables with a conventional
rectangular evaluation domain.  Evaluators accept floats or numpy arrays
and broadcast elementwise.

Rosenbrock is implemented in its standard two-dimensional form
100*(y - x^2)^2 + (1 - x)^2; transcriptions that print the first term as
100*(x^4 - 2*x*y + y^2) drop a square on the cross term and lose the
single-minimum valley structure, so the standard form is used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

__all__ = [
    "BOREHOLE_CONSTANTS",
    "Domain",
    "EvaluationDomainError",
    "TestFunction",
    "UnknownFunctionError",
    "available_functions",
    "eval_ackley",
    "eval_borehole",
    "eval_rosenbrock",
    "lookup",
]


class UnknownFunctionError(ValueError):
    """Raised by :func:`lookup` for names not in the registry."""


class EvaluationDomainError(ValueError):
    """Raised when an evaluator is called outside its mathematical domain."""


@dataclass(frozen=True)
class Domain:
    """Closed rectangle [x_min, x_max] x [y_min, y_max]."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        bounds = (self.x_min, self.x_max, self.y_min, self.y_max)
        if not all(math.isfinite(b) for b in bounds):
            raise ValueError(f"domain bounds must be finite, got {bounds}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"domain bounds must be ordered, got {bounds}")


@dataclass(frozen=True)
class TestFunction:
    """A named scalar function of two variables with its default domain."""

    name: str
    domain: Domain
    evaluator: Callable[..., float]
    constants: Mapping[str, float] = field(default_factory=dict)

    def __call__(self, x, y):
        return self.evaluator(x, y)


#: Fixed Borehole model constants.
BOREHOLE_CONSTANTS: Mapping[str, float] = {
    "r_w": 0.1,
    "T_u": 89335.0,
    "H_u": 1050.0,
    "T_l": 89.55,
    "H_l": 760.0,
    "K_w": 10950.0,
}


def eval_ackley(x, y):
    """Ackley surface; oscillatory, minimum 0 at the origin.

    -20*exp(-0.2*sqrt((x^2 + y^2)/2)) - exp((cos(2*pi*x) + cos(2*pi*y))/2)
    + 20 + e, grouped as 20*(1 - exp(..)) + (e - exp(..)) so the origin
    evaluates to exactly zero in float64.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    radial = np.exp(-0.2 * np.sqrt(0.5 * (x * x + y * y)))
    cosine = np.exp(0.5 * (np.cos(2.0 * np.pi * x) + np.cos(2.0 * np.pi * y)))
    return 20.0 * (1.0 - radial) + (np.e - cosine)


def eval_rosenbrock(x, y):
    """Standard 2-D Rosenbrock: 100*(y - x^2)^2 + (1 - x)^2, minimum 0 at (1, 1)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return 100.0 * (y - x * x) ** 2 + (1.0 - x) ** 2


def eval_borehole(r, L, constants: Mapping[str, float] = BOREHOLE_CONSTANTS):
    """Borehole water-flow model as a function of radius r and length L.

    Requires r > r_w (so the log term is positive) and L > 0.
    """
    r = np.asarray(r, dtype=np.float64)
    L = np.asarray(L, dtype=np.float64)
    r_w = constants["r_w"]
    if np.any(r <= r_w):
        raise EvaluationDomainError(f"borehole requires r > r_w = {r_w}")
    if np.any(L <= 0.0):
        raise EvaluationDomainError("borehole requires L > 0")
    T_u, H_u = constants["T_u"], constants["H_u"]
    T_l, H_l = constants["T_l"], constants["H_l"]
    K_w = constants["K_w"]
    log_ratio = np.log(r / r_w)
    numerator = 2.0 * np.pi * T_u * (H_u - H_l)
    denominator = log_ratio * (
        1.0 + 2.0 * L * T_u / (log_ratio * r_w**2 * K_w) + T_u / T_l
    )
    return numerator / denominator


_REGISTRY: dict[str, TestFunction] = {
    "ackley": TestFunction(
        name="ackley",
        domain=Domain(-5.0, 5.0, -5.0, 5.0),
        evaluator=eval_ackley,
    ),
    "rosenbrock": TestFunction(
        name="rosenbrock",
        domain=Domain(-2.0, 2.0, -2.0, 2.0),
        evaluator=eval_rosenbrock,
    ),
    "borehole": TestFunction(
        name="borehole",
        domain=Domain(100.0, 50000.0, 1120.0, 1680.0),
        evaluator=eval_borehole,
        constants=BOREHOLE_CONSTANTS,
    ),
}


def available_functions() -> tuple[str, ...]:
    """Registered function names, in registry order."""
    return tuple(_REGISTRY)


def lookup(name: str) -> TestFunction:
    """Fetch a registered test function by name.

    Raises :class:`UnknownFunctionError` for unregistered names, listing
    the valid ones.
    """
    try:
        return _REGISTRY[name]
    except KeyError:
        valid = ", ".join(_REGISTRY)
        raise UnknownFunctionError(
            f"unknown function {name!r}; valid names: {valid}"
        ) from None
