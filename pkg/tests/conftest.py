import numpy as np
import pytest

from blast.potentials import ParameterSpace, ParameterSpec, parameter_space

SW_SI = np.array([
    2.1683, 2.0951, 1.80, 21.0, 1.20, -1.0 / 3.0,
    7.049556277, 0.6022245584, 4.0, 0.0,
])


def box_space(n, lo=-5.0, hi=5.0):
    """Generic n-dimensional box for optimizer tests on plain functions."""
    specs = [ParameterSpec(f"x{i}", "", lo, hi, lo, hi) for i in range(n)]
    return ParameterSpace("lennard_jones", ("X",), specs)


@pytest.fixture
def lj_space():
    return parameter_space("lennard_jones", ["X"])


@pytest.fixture
def sw_space():
    return parameter_space("stillinger_weber", ["Si"])


@pytest.fixture
def sw_si_params():
    return SW_SI.copy()
