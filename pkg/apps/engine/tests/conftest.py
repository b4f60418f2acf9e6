import numpy as np
import pytest

from src.asymptotics.landscape import TraceOptions


@pytest.fixture
def opts() -> TraceOptions:
    return TraceOptions()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
