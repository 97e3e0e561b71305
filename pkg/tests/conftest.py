# tests/conftest.py
from functools import lru_cache
import pytest
from core.entities import ModularParameter
from service.pipeline import ThetaPipeline, build_theta_pipeline

SQUARE = 1j
SKEWED = complex(0.3, 0.8)


@lru_cache(maxsize=None)
def theta_pipeline(tau: complex, n_bands: int, n: int) -> ThetaPipeline:
    """Pipelines are pure functions of (τ, N, n); share them across tests."""
    return build_theta_pipeline(ModularParameter(tau), n_bands, n)


@pytest.fixture
def pipeline():
    return theta_pipeline
