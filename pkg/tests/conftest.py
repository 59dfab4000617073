import pytest

from tendonfinger.config import parse_config
from tendonfinger.dynamics import ActuatorParams, FingerParams
from tendonfinger.simulator import run

STEP_CFG = """
traj.kind = step
traj.amplitude_deg = 60
sim.t_end = 5
"""

CUBIC_CFG = """
traj.kind = cubic_poly
traj.coeffs = -0.0021, 0.0314, 0, 0
traj.t_final = 10
sim.t_end = 10
"""


@pytest.fixture
def fp():
    return FingerParams()


@pytest.fixture
def ap():
    return ActuatorParams()


@pytest.fixture(scope="session")
def step_cfg():
    return parse_config(STEP_CFG)


@pytest.fixture(scope="session")
def cubic_cfg():
    return parse_config(CUBIC_CFG)


@pytest.fixture(scope="session")
def step_trace(step_cfg):
    return run(step_cfg)


@pytest.fixture(scope="session")
def cubic_trace(cubic_cfg):
    return run(cubic_cfg)

