"""Shared random-state samplers for the test suite."""

import numpy as np

from qbmm.inversion import EqmomState, NodeSet


def random_interior_state(rng, n, min_gap=0.5):
    """Well-separated interior Gaussian-mixture state."""
    while True:
        u = np.sort(rng.uniform(-2, 2, n))
        if n == 1 or np.min(np.diff(u)) > min_gap:
            break
    w = rng.uniform(0.2, 2.0, n)
    s2 = rng.uniform(0.05, 2.0)
    return EqmomState(NodeSet(w, u), s2)
