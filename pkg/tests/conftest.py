import numpy as np
import pytest

from bsfb.params import ModelParams, ReducedParams


@pytest.fixture
def model_q4() -> ModelParams:
    """sigma = 1, b = rho*omega = 1, k = 1: the exact-catalogue bundle."""
    return ModelParams(sigma=1.0, rho=0.5, omega=2.0, k=1.0)


@pytest.fixture
def reduced_q4() -> ReducedParams:
    return ReducedParams.from_q(4.0, b=1.0, sigma=1.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
