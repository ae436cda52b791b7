"""Shared fixtures: hand-built reference networks."""

import numpy as np
import pytest

from uat_bench.network import NetworkParameters


def make_abs_network():
    """Width-2, depth-1 network computing |x| exactly: relu(x) + relu(-x)."""
    W0 = np.array([[1.0, 0.0], [-1.0, 0.0]])
    W1 = np.array([[1.0, 1.0]])
    return NetworkParameters(layers=((W0, np.zeros(2)), (W1, np.zeros(1))))


@pytest.fixture
def abs_network():
    return make_abs_network()
