import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bqp import Instance

settings.register_profile(
    "ci", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60
)
settings.load_profile("ci")


@pytest.fixture
def e1() -> Instance:
    """2x2 worked example; optimum 3 at x=(0,1), y=(0,1)."""
    return Instance([[3, -2], [-1, 4]], [1, -1], [-2, 0])


def tight_family(m: int) -> Instance:
    """Bordered identity with -n off-border entries; greedy gets 1, optimum m-1."""
    Q = np.eye(m, dtype=np.int64)
    Q[0, 1:] = -m
    Q[1:, 0] = -m
    return Instance(Q, np.zeros(m, dtype=np.int64), np.zeros(m, dtype=np.int64))


def random_instance(
    rng: np.random.Generator,
    m: int,
    n: int,
    lo: int = -50,
    hi: int = 50,
    zero_c: bool = False,
    zero_d: bool = False,
) -> Instance:
    Q = rng.integers(lo, hi + 1, size=(m, n))
    c = np.zeros(m, dtype=np.int64) if zero_c else rng.integers(lo, hi + 1, size=m)
    d = np.zeros(n, dtype=np.int64) if zero_d else rng.integers(lo, hi + 1, size=n)
    return Instance(Q, c, d)
