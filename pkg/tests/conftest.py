import math

import pytest

from stepcoin import ClassifierConfig, CoinSpec, Limits
from stepcoin.walker import BaselineWalker, Walker


@pytest.fixture(scope="session")
def limits() -> Limits:
    return Limits(max_steps=2_000, max_density_steps=40)


@pytest.fixture(scope="session")
def classifier_config() -> ClassifierConfig:
    return ClassifierConfig.default()


@pytest.fixture(scope="session")
def hadamard() -> CoinSpec:
    return CoinSpec.sic(math.pi / 4)


@pytest.fixture(scope="session")
def default_walker(hadamard: CoinSpec, limits: Limits) -> Walker:
    return Walker(hadamard, limits=limits)


@pytest.fixture(scope="session")
def baseline_walker(hadamard: CoinSpec, limits: Limits) -> BaselineWalker:
    return BaselineWalker(hadamard, limits=limits)
