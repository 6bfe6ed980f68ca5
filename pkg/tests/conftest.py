import numpy as np
import pytest

from ellq.theta import EllipticParams

TAU = 0.8j
HBAR = 0.23 + 0.11j


@pytest.fixture(scope="session")
def params():
    return EllipticParams(tau=TAU, hbar=HBAR)


@pytest.fixture()
def rng():
    return np.random.default_rng(7)


def random_z(rng, scale=0.35):
    return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def random_lambda(rng, n, spread=0.45):
    """Generic dynamical parameter with coordinates spaced to avoid poles."""
    base = np.linspace(0, (n - 1) * spread, n)
    jitter = rng.uniform(-0.08, 0.08, n) + 1j * rng.uniform(0.05, 0.23, n)
    return base + jitter
