import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from regrates import SpectralElement

settings.register_profile(
    "regrates", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("regrates")


@st.composite
def elements(draw, max_atoms=12, lam_lo=-4.0, lam_hi=0.0):
    """Elements with distinct eigenvalues in [10**lam_lo, 10**lam_hi] and nonzero coefficients."""
    n = draw(st.integers(1, max_atoms))
    exps = draw(st.lists(st.floats(lam_lo, lam_hi), min_size=n, max_size=n, unique=True))
    lam = np.unique(10.0 ** np.array(exps))
    coef = draw(st.lists(st.floats(0.05, 10.0), min_size=lam.size, max_size=lam.size))
    signs = draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=lam.size, max_size=lam.size))
    return SpectralElement(lam, np.array(coef) * np.array(signs))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
