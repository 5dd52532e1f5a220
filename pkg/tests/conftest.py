import numpy as np
import pytest

from powersense.efficiency import EfficiencyModel
from powersense.oneshot import NetworkConfig


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def model():
    return EfficiencyModel.exp_ratio(0.5)


@pytest.fixture
def ref_cfg():
    """Two unit-gain, unit-rate links with sigma2 = 0.1 and ten-fold processing gain."""
    return NetworkConfig(K=2, h=1.0, R=1.0, sigma2=0.1, Pmax=1.0, alpha=0.05, N=10.0)
