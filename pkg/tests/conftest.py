import numpy as np
import pytest

from bundles.bundle import Originator
from data.moments import CustomerModel
from data.preferences import PreferenceDistribution, generate_distribution
from experiments.pricing import ShopPricing
from strategy.bidding import StrategyKind, StrategyParams


def make_params(role: Originator, gap_init: float = 0.5, delta: float = 0.1,
                kind: StrategyKind = StrategyKind.TDF) -> StrategyParams:
    return StrategyParams(kind=kind, role=role, gap_init=gap_init, delta=delta)


@pytest.fixture
def small_dist() -> PreferenceDistribution:
    return generate_distribution(7, n=4)


@pytest.fixture
def dist5() -> PreferenceDistribution:
    return generate_distribution(11, n=5)


@pytest.fixture
def dist10() -> PreferenceDistribution:
    return generate_distribution(13, n=10)


@pytest.fixture
def flat_dist() -> PreferenceDistribution:
    """Five identical, independent goods."""
    return PreferenceDistribution.from_sd([100.0] * 5, [10.0] * 5, np.eye(5))


@pytest.fixture
def pricing5(dist5) -> ShopPricing:
    return ShopPricing.for_distribution(dist5)


@pytest.fixture
def model5(dist5) -> CustomerModel:
    return CustomerModel(dist5)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
