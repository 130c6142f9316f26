import itertools
import math

import numpy as np
import pytest

from isinglearn.graph import Graph, IsingParams


def brute_force_probs(params: IsingParams) -> tuple[np.ndarray, np.ndarray]:
    """States via itertools.product and their normalized weights, independent of the package."""
    states = np.array(list(itertools.product([-1, 1], repeat=params.p)), dtype=float)
    logw = np.zeros(len(states))
    for (i, j), th in params.couplings.items():
        logw += th * states[:, i] * states[:, j]
    if params.fields is not None:
        logw += states @ np.asarray(params.fields, dtype=float)
    w = np.exp(logw - logw.max())
    return states, w / w.sum()


def path(p: int) -> Graph:
    return Graph(p, [(i, i + 1) for i in range(p - 1)])


def cycle(p: int) -> Graph:
    return Graph(p, [(i, (i + 1) % p) for i in range(p)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def tanh(x):
    return math.tanh(x)
