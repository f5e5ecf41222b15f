import numpy as np
import pytest

from ddrom import lti


@pytest.fixture
def scalar_system():
    """One-state system with pole 0.5 and H(z) = 1/(z - 0.5)."""
    return lti.DiscreteLTI(E=[[1.0]], A=[[0.5]], b=[1.0], c=[1.0], stable=True)


@pytest.fixture
def order50_data():
    """Seeded order-50 system with a noise-free Gaussian trajectory of length 10n."""
    fom = lti.random_stable_system(50, 0.9, seed=20)
    rng = np.random.default_rng(21)
    data = lti.simulate(fom, rng.standard_normal(501))
    return fom, data
