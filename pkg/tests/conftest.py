import hypothesis
import numpy as np
import pytest

from stepwell import PotentialSpec

hypothesis.settings.register_profile(
    "default", max_examples=30, deadline=None, derandomize=True
)
hypothesis.settings.load_profile("default")

PI = np.pi


@pytest.fixture
def box_spec():
    """Unit-depth box on (0, pi): eigenvalues n^2."""
    return PotentialSpec((0.0, PI), (0.0,))


@pytest.fixture
def n1_step_spec():
    """One interior step: breakpoints (0, 1, 2), heights (0, 5)."""
    return PotentialSpec((0.0, 1.0, 2.0), (0.0, 5.0))


@pytest.fixture
def double_well_spec():
    """Asymmetric double well (0,1,2,pi) with central barrier 10."""
    return PotentialSpec((0.0, 1.0, 2.0, PI), (0.0, 10.0, 0.0))
