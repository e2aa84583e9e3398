import math

import pytest

from rispathloss import (
    CodingState,
    RisGrid,
    Scenario,
    TerminalPlacement,
    spherical_to_cartesian,
)
from rispathloss.units import db_to_linear, dbm_to_watts

RIS1_GAIN = 109.6
RIS2_GAIN = 128.8


def ris1_grid():
    return RisGrid(20, 56, 1.4e-3, 2.8e-3, 27e9)


def ris2_grid():
    return RisGrid(40, 40, 3.8e-3, 3.8e-3, 33e9)


def ris1_states():
    return CodingState.from_degrees("0", 0.9, 165.0), CodingState.from_degrees("1", 0.7, 0.0)


def ris2_states():
    return CodingState.from_degrees("0", 0.8, 150.0), CodingState.from_degrees("1", 0.8, 0.0)


def make_scenario(grid, rmap, tx, rx, gain, cal_db=None, pt_dbm=20.0, gain_r=None):
    gain_r = gain if gain_r is None else gain_r
    t = TerminalPlacement.with_gain(tx, gain)
    r = TerminalPlacement.with_gain(rx, gain_r)
    g_line = 1.0 if cal_db is None else db_to_linear(cal_db) / (t.gain * r.gain)
    return Scenario(grid, rmap, t, r, dbm_to_watts(pt_dbm), g_line)


def specular(d1, d2, theta_deg):
    th = math.radians(theta_deg)
    return spherical_to_cartesian(d1, th, math.pi), spherical_to_cartesian(d2, th, 0.0)


@pytest.fixture
def ris1():
    return ris1_grid()


@pytest.fixture
def ris2():
    return ris2_grid()
