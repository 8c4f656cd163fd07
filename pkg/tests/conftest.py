import numpy as np
import pytest

from fcltmc.rng import RngStreamSpec


@pytest.fixture
def stream() -> RngStreamSpec:
    return RngStreamSpec(42, 0)


def within(value: float, target: float, tol: float) -> bool:
    return abs(value - target) <= tol


def collect(fn, reps: int, base: RngStreamSpec) -> np.ndarray:
    """Replicate values of a scalar path functional, replicate-indexed streams."""
    return np.array([fn(base.replicate(i)) for i in range(reps)])
