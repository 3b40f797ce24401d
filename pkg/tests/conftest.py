"""Shared fixtures: seeded RNG streams and a small pool of random semilattices."""

import numpy as np
import pytest

from amnm import random_semilattice


@pytest.fixture
def rng():
    """Fresh deterministic generator for a single test."""
    return np.random.default_rng(20260814)


@pytest.fixture(scope="session")
def semilattice_pool():
    """Thirty random semilattices (n <= 8) shared across structural tests."""
    gen = np.random.default_rng(1234)
    return [random_semilattice(gen) for _ in range(30)]
