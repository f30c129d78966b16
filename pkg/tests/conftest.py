import math

import numpy as np
import pytest
from hypothesis import settings

from squeezed_trajectories import BathSpec, ModelParams

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

SQRT2 = math.sqrt(2.0)


def random_bath(rng, n_max=1.0, pure=False, beta_max=1.0):
    """A physical bath with ``n <= n_max`` and ``|m|^2 <= n(n+1)``."""
    n = rng.uniform(0, n_max)
    r = math.sqrt(n * (n + 1)) * (1.0 if pure else rng.uniform(0, 1))
    m = r * np.exp(1j * rng.uniform(0, 2 * math.pi))
    beta = beta_max * rng.uniform(-1, 1) + 1j * beta_max * rng.uniform(-1, 1)
    return BathSpec(n, m, beta)


def random_state_cov(rng, nu_max=1.0):
    """Physical ``(zeta, nu)`` with ``|zeta|^2 <= nu(nu+1)``."""
    nu = rng.uniform(0, nu_max)
    zeta = math.sqrt(nu * (nu + 1)) * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * math.pi))
    return complex(zeta), nu


def random_params(rng, mu_range=(0.5, 2.0)):
    return ModelParams(rng.uniform(-1, 1), rng.uniform(*mu_range), rng.uniform(0, 2 * math.pi))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.REPORT, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
