from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fieldwork import qsys
from fieldwork.field import FieldConfig

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_process(rng: np.random.Generator, d: int, beta: float | None = None, rank: int | None = None):
    """Generic (non-commuting) process; thermal on ``h0`` when ``beta`` is given."""
    h0 = qsys.random_hermitian(d, rng)
    htau = qsys.random_hermitian(d, rng)
    u = qsys.random_unitary(d, rng)
    rho = qsys.gibbs(h0, beta) if beta is not None else qsys.random_density(d, rng, rank=rank)
    return qsys.ProcessSpec(rho, h0, htau, u)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def standard_cfg():
    return FieldConfig.standard()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
