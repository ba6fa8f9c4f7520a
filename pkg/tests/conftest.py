import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from prflow import scenarios
from prflow.flow import evolve

settings.register_profile("prflow", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("prflow")


def _run(builder, **kw):
    phi0, bd, cfg = builder(**kw)
    return phi0, bd, cfg, evolve(phi0, bd, cfg)


@pytest.fixture(scope="session")
def a1_run():
    return _run(scenarios.exact_mode)


@pytest.fixture(scope="session")
def a2_run():
    return _run(scenarios.subcritical)


@pytest.fixture(scope="session")
def a3_run():
    return _run(scenarios.resonance)


@pytest.fixture(scope="session")
def a4_exp_run():
    return _run(scenarios.supercritical)


@pytest.fixture(scope="session")
def a4_lin_run():
    return _run(scenarios.resonance_frozen)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
