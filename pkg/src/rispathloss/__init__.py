"""Free-space path-loss models for reconfigurable intelligent surfaces."""

from .configuration import (
    CodingState,
    ReflectionMap,
    focusing_phases,
    quantize_1bit,
    stripe_coding,
    uniform_coding,
)
from .engine import (
    PowerResult,
    Scenario,
    SweepTable,
    TerminalPlacement,
    metal_plate_received_power,
    pathloss_farfield_beam_refined,
    pathloss_nearfield_broadcast,
    pathloss_nearfield_focus_refined,
    pathloss_single_cell,
    received_power_general_legacy,
    received_power_general_refined,
    sweep_angle,
    sweep_distance,
)
from .geometry import (
    CellLinkGeometry,
    Point3,
    RisGrid,
    cell_center,
    fraunhofer_distance,
    link_geometry,
    spherical_to_cartesian,
)
from .patterns import AntennaPattern, combined_pattern

__version__ = "0.1.0"
