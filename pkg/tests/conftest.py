"""Shared scenes and the acceptance report hook."""

from functools import lru_cache

import numpy as np
import pytest

from acoustorque import AIR, TransducerArray
from acoustorque.scatter import tmatrix_nullfield

FREQUENCY = 40e3
K_AIR = AIR.wavenumber(FREQUENCY)

SPHERE = (0.002,)
ELLIPSOID = (0.002, 0.0, 0.0004)
CONE = (0.002, 0.0, 0.0, 0.00025)
CYLINDER = (0.002, 0.0, -0.0005, 0.0, -0.00025)
DIAMOND = (0.002, 0.0, 0.0, 0.0, 0.0002)
REFERENCE_SHAPES = {"cone": CONE, "cylinder": CYLINDER, "diamond": DIAMOND, "ellipsoid": ELLIPSOID}

FOUR_ELEMENT = TransducerArray(
    radius=0.005,
    positions=[[0, 0, 0], [0.01, 0, 0], [-0.01, 0, 0], [0, 0.01, 0]],
    v0=1.5,
    phase_delay=[0, 0, np.pi / 2, 0],
    amplitude_ratio=[1, 1, 1, 1],
    interdistance=0.02,
)
FIVE_ELEMENT = TransducerArray(
    radius=0.005,
    positions=[[0, 0, 0], [0.01, 0, 0], [-0.01, 0, 0], [0, 0.01, 0], [0, -0.01, 0]],
    v0=1.5,
    interdistance=0.02,
)


@lru_cache(maxsize=None)
def cached_tmatrix(c, bc="sound_hard", n_max=11):
    return tmatrix_nullfield(c, bc, K_AIR, n_max)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


# -- acceptance report -----------------------------------------------------------------

ACCEPTANCE_LINES = {}


def record_acceptance(number: int, title: str, passed: bool, detail: str):
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES[number] = f"criterion {number:2d} [{status}] {title}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
