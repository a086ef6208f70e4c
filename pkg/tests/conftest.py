"""Shared fixtures: the certified inputs, loaded once per session."""

import pytest

from certgal.bigarith import IntPoly
from certgal.pipeline import load_config


@pytest.fixture(scope="session")
def cfg():
    return load_config()


@pytest.fixture(scope="session")
def P(cfg) -> IntPoly:
    return cfg.P


@pytest.fixture(scope="session")
def R(cfg) -> IntPoly:
    return cfg.R
