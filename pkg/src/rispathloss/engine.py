"""Received power and path loss of RIS-assisted links, and parameter sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .configuration import ReflectionMap
from .geometry import (
    CellLinkGeometry,
    Point3,
    RisGrid,
    _geometry,
    elevation_of,
    spherical_to_cartesian,
)
from .patterns import AntennaPattern, as_pattern, combined_pattern
from .reduction import blocked_sum
from .units import watts_to_dbm

LEGACY_SCATTERING_GAIN = 4.0


@dataclass(frozen=True)
class TerminalPlacement:
    """Antenna position and pattern; ``gain`` is the linear peak gain."""

    position: Point3
    pattern: AntennaPattern

    def __post_init__(self):
        if not self.position.z > 0:
            raise ValueError("terminal must lie in front of the surface (z > 0)")

    @classmethod
    def with_gain(cls, position: Point3, gain: Union[float, AntennaPattern]) -> "TerminalPlacement":
        return cls(position, as_pattern(gain))

    @property
    def gain(self) -> float:
        return self.pattern.gain

    def moved_to(self, position: Point3) -> "TerminalPlacement":
        return replace(self, position=position)


@dataclass(frozen=True)
class Scenario:
    """A complete RIS link.

    ``g_line`` is the lumped cable/calibration gain: the power prefactor uses
    ``G_t * G_r * g_line`` while the patterns keep the nominal gains.
    """

    grid: RisGrid
    reflection: ReflectionMap
    tx: TerminalPlacement
    rx: TerminalPlacement
    pt: float
    g_line: float = 1.0

    def __post_init__(self):
        if self.reflection.grid != self.grid:
            raise ValueError("reflection map was built for a different grid")
        if not self.pt > 0:
            raise ValueError(f"transmit power must be positive, got {self.pt}")
        if not self.g_line > 0:
            raise ValueError(f"calibration gain must be positive, got {self.g_line}")

    @property
    def link_gain(self) -> float:
        return self.tx.gain * self.rx.gain * self.g_line

    @property
    def d1(self) -> float:
        return self.tx.position.norm

    @property
    def d2(self) -> float:
        return self.rx.position.norm

    def swapped(self) -> "Scenario":
        return replace(self, tx=self.rx, rx=self.tx)

    def with_rx(self, position: Point3) -> "Scenario":
        return replace(self, rx=self.rx.moved_to(position))

    def with_reflection(self, reflection: ReflectionMap) -> "Scenario":
        return replace(self, reflection=reflection)


@dataclass(frozen=True)
class PowerResult:
    """Received power ``pr`` (W) for transmit power ``pt`` (W); ``pr == 0`` means no coupling."""

    pr: float
    pt: float

    @property
    def no_coupling(self) -> bool:
        return self.pr == 0.0

    @property
    def pl(self) -> float:
        return math.inf if self.no_coupling else self.pt / self.pr

    @property
    def pr_dbm(self) -> float:
        return watts_to_dbm(self.pr)

    @property
    def pl_db(self) -> float:
        if self.no_coupling:
            raise ValueError("no coupling: path loss is unbounded")
        return 10.0 * math.log10(self.pl)


def _pl_from_ratio(numerator: float, denominator: float) -> float:
    return math.inf if denominator == 0.0 else numerator / denominator


# ---------------------------------------------------------------------------
# general models


def _cell_weights(s: Scenario, start: int, stop: int):
    """``sqrt(F) / (r_t r_r)`` and the path phase ``k (r_t + r_r)`` for flat cells ``start..stop-1``."""
    grid = s.grid
    idx = np.arange(start, stop)
    n = idx // grid.cols
    m = idx % grid.cols
    x = (m + 1 - (grid.cols + 1) / 2.0) * grid.cell_width
    y = (n + 1 - (grid.rows + 1) / 2.0) * grid.cell_length
    geom = _geometry(x, y, s.tx.position, s.rx.position)
    f = combined_pattern(geom, s.tx.pattern, s.rx.pattern)
    k = 2.0 * math.pi / grid.wavelength
    return np.sqrt(f) / (geom.r_t * geom.r_r), k * (geom.r_t + geom.r_r)


def _cell_terms(s: Scenario, start: int, stop: int) -> np.ndarray:
    weight, path = _cell_weights(s, start, stop)
    gamma = s.reflection.gamma.reshape(-1)[start:stop]
    return weight * gamma * np.exp(-1j * path)


def coherent_sum(s: Scenario, workers: int = 1) -> complex:
    """The complex cell sum shared by the general models, in row-major order."""
    return complex(blocked_sum(s.grid.size, lambda a, b: _cell_terms(s, a, b), workers=workers))


def magnitude_sum(s: Scenario, workers: int = 1) -> float:
    """Sum of ``sqrt(F) / (r_t r_r)`` over all cells, phases dropped."""
    return float(blocked_sum(s.grid.size, lambda a, b: _cell_weights(s, a, b)[0], workers=workers))


def received_power_general_refined(s: Scenario, workers: int = 1) -> PowerResult:
    """General model with the cell-area scattering prefactor ``(d_x d_y)^2 / (16 pi^2)``."""
    total = coherent_sum(s, workers)
    mag2 = total.real * total.real + total.imag * total.imag
    pr = s.pt * s.link_gain * s.grid.cell_area**2 / (16.0 * math.pi**2) * mag2
    return PowerResult(pr, s.pt)


def received_power_general_legacy(
    s: Scenario, scattering_gain: float = LEGACY_SCATTERING_GAIN, workers: int = 1
) -> PowerResult:
    """General model with an explicit cell scattering gain ``G``.

    The prefactor is ``G d_x d_y lambda^2 / (64 pi^3)``; ``G = 4 pi d_x d_y / lambda^2``
    reproduces :func:`received_power_general_refined`.
    """
    if not scattering_gain > 0:
        raise ValueError(f"scattering gain must be positive, got {scattering_gain}")
    total = coherent_sum(s, workers)
    mag2 = total.real * total.real + total.imag * total.imag
    lam = s.grid.wavelength
    pr = s.pt * s.link_gain * scattering_gain * s.grid.cell_area * lam * lam / (64.0 * math.pi**3) * mag2
    return PowerResult(pr, s.pt)


def scattering_gain_from_area(grid: RisGrid) -> float:
    """Cell scattering gain equivalent to a metal plate of the cell's size."""
    return 4.0 * math.pi * grid.cell_area / grid.wavelength**2


# ---------------------------------------------------------------------------
# closed forms


def pathloss_farfield_beam_refined(
    grid: RisGrid,
    gt: float,
    gr: float,
    g_line: float,
    d1: float,
    d2: float,
    theta_t: float,
    theta_r: float,
    amplitude: float,
) -> float:
    """Far-field beamforming path loss, ``16 pi^2 (d1 d2)^2`` over the aperture-squared gain."""
    if not (d1 > 0 and d2 > 0):
        raise ValueError("distances must be positive")
    for name, th in (("theta_t", theta_t), ("theta_r", theta_r)):
        if not 0.0 <= th <= math.pi / 2:
            raise ValueError(f"{name} must lie in [0, pi/2], got {th}")
    ct = max(math.cos(theta_t), 0.0) if theta_t < math.pi / 2 else 0.0
    cr = max(math.cos(theta_r), 0.0) if theta_r < math.pi / 2 else 0.0
    den = gt * gr * g_line * (grid.size * grid.cell_area) ** 2 * ct * cr * amplitude**2
    return _pl_from_ratio(16.0 * math.pi**2 * (d1 * d2) ** 2, den)


def pathloss_nearfield_focus_refined(s: Scenario, workers: int = 1) -> float:
    """Near-field focusing path loss, evaluated with the magnitude sum and uniform ``|gamma|``."""
    a = s.reflection.uniform_amplitude()
    total = magnitude_sum(s, workers)
    den = s.link_gain * s.grid.cell_area**2 * a * a * total * total
    return _pl_from_ratio(16.0 * math.pi**2, den)


def pathloss_nearfield_broadcast(
    gt: float, gr: float, g_line: float, d1: float, d2: float, wavelength: float, amplitude: float
) -> float:
    """Geometric-optics broadcast path loss, ``16 pi^2 (d1 + d2)^2 / (G_t G_r lambda^2 A^2)``."""
    if not (d1 > 0 and d2 > 0):
        raise ValueError("distances must be positive")
    den = gt * gr * g_line * wavelength**2 * amplitude**2
    return _pl_from_ratio(16.0 * math.pi**2 * (d1 + d2) ** 2, den)


def pathloss_single_cell(
    geom: CellLinkGeometry,
    tx: Union[float, AntennaPattern],
    rx: Union[float, AntennaPattern],
    g_line: float,
    cell_width: float,
    cell_length: float,
    gamma: complex,
) -> float:
    """Path loss of the sub-channel through one cell."""
    txp = as_pattern(tx)
    rxp = as_pattern(rx)
    f = float(combined_pattern(geom, txp, rxp))
    den = txp.gain * rxp.gain * g_line * (cell_width * cell_length) ** 2 * f * abs(gamma) ** 2
    return _pl_from_ratio(16.0 * math.pi**2 * (geom.r_t * geom.r_r) ** 2, den)


def plate_rcs(grid: RisGrid) -> float:
    """Radar cross section ``4 pi (area)^2 / lambda^2`` of a plate with the RIS outline."""
    return 4.0 * math.pi * grid.area**2 / grid.wavelength**2


def metal_plate_received_power(
    grid: RisGrid, gt: float, gr: float, g_line: float, d1: float, d2: float, pt: float
) -> PowerResult:
    """Bistatic radar equation for a plate at normal incidence.

    Substituting :func:`plate_rcs` into the radar equation cancels the
    wavelength, leaving ``P_t G_t G_r (area)^2 / (16 pi^2 (d1 d2)^2)``.
    """
    pr = pt * gt * gr * g_line * grid.area**2 / (16.0 * math.pi**2 * (d1 * d2) ** 2)
    return PowerResult(pr, pt)


def _scenario_closed_form(s: Scenario, kind: str) -> float:
    if kind == "farfield":
        return pathloss_farfield_beam_refined(
            s.grid,
            s.tx.gain,
            s.rx.gain,
            s.g_line,
            s.d1,
            s.d2,
            elevation_of(s.tx.position),
            elevation_of(s.rx.position),
            s.reflection.uniform_amplitude(),
        )
    if kind == "focus":
        return pathloss_nearfield_focus_refined(s)
    if kind == "broadcast":
        return pathloss_nearfield_broadcast(
            s.tx.gain, s.rx.gain, s.g_line, s.d1, s.d2, s.grid.wavelength, s.reflection.uniform_amplitude()
        )
    if kind == "plate":
        return s.pt / metal_plate_received_power(s.grid, s.tx.gain, s.rx.gain, s.g_line, s.d1, s.d2, s.pt).pr
    raise ValueError(f"unknown closed-form model {kind!r}")


CLOSED_FORMS = ("farfield", "focus", "broadcast", "plate")


def closed_form_power(s: Scenario, kind: str) -> PowerResult:
    """Received power predicted by one of :data:`CLOSED_FORMS` for scenario ``s``."""
    pl = _scenario_closed_form(s, kind)
    return PowerResult(0.0 if math.isinf(pl) else s.pt / pl, s.pt)


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepTable:
    """Received power (W) per model column along an increasing abscissa.

    ``kind`` is ``"angle"`` (signed degrees) or ``"distance"`` (meters).
    """

    kind: str
    x: np.ndarray
    columns: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("angle", "distance"):
            raise ValueError(f"abscissa kind must be 'angle' or 'distance', got {self.kind!r}")
        self.x = np.asarray(self.x, dtype=float)
        if self.x.size > 1 and np.any(np.diff(self.x) <= 0):
            raise ValueError("sweep abscissa must be strictly increasing")
        for name, col in self.columns.items():
            col = np.asarray(col, dtype=float)
            if col.shape != self.x.shape:
                raise ValueError(f"column {name!r} length does not match the abscissa")
            self.columns[name] = col

    def dbm(self, name: str = "refined") -> np.ndarray:
        col = self.columns[name]
        if np.any(col <= 0):
            raise ValueError(f"column {name!r} has no-coupling points; cannot express in dBm")
        return 10.0 * np.log10(col / 1e-3)


def _arange(start: float, stop: float, step: float) -> np.ndarray:
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if stop < start:
        raise ValueError(f"empty range [{start}, {stop}]")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _evaluate(s: Scenario, models: Sequence[str], legacy_gain: float) -> dict:
    out = {}
    for name in models:
        if name == "refined":
            out[name] = received_power_general_refined(s).pr
        elif name == "legacy":
            out[name] = received_power_general_legacy(s, legacy_gain).pr
        else:
            out[name] = closed_form_power(s, name).pr
    return out


def _run_sweep(kind, x, scenarios, models, legacy_gain, workers):
    models = tuple(models)
    for name in models:
        if name not in ("refined", "legacy") + CLOSED_FORMS:
            raise ValueError(f"unknown model {name!r}")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda sc: _evaluate(sc, models, legacy_gain), scenarios))
    else:
        rows = [_evaluate(sc, models, legacy_gain) for sc in scenarios]
    columns = {name: np.array([r[name] for r in rows]) for name in models}
    return SweepTable(kind, x, columns)


def angle_position(d2: float, signed_deg: float) -> Point3:
    """Receiver at ``d2`` and ``|angle|``; negative angles sit at azimuth pi."""
    phi = math.pi if signed_deg < 0 else 0.0
    return spherical_to_cartesian(d2, math.radians(abs(signed_deg)), phi)


def sweep_angle(
    s: Scenario,
    start_deg: float,
    stop_deg: float,
    step_deg: float,
    models: Sequence[str] = ("refined",),
    legacy_gain: float = LEGACY_SCATTERING_GAIN,
    workers: int = 1,
) -> SweepTable:
    """Move the receiver over signed reception angles at fixed distance ``s.d2``."""
    if not (-90.0 < start_deg and stop_deg < 90.0):
        raise ValueError("angle span must lie inside (-90, 90) degrees")
    x = _arange(start_deg, stop_deg, step_deg)
    d2 = s.d2
    scenarios = [s.with_rx(angle_position(d2, a)) for a in x]
    return _run_sweep("angle", x, scenarios, models, legacy_gain, workers)


def sweep_distance(
    s: Scenario,
    start_m: float,
    stop_m: float,
    step_m: float,
    theta_r: Optional[float] = None,
    phi_r: Optional[float] = None,
    models: Sequence[str] = ("refined",),
    legacy_gain: float = LEGACY_SCATTERING_GAIN,
    workers: int = 1,
    points: Optional[Sequence[float]] = None,
) -> SweepTable:
    """Move the receiver radially along a fixed direction.

    The direction defaults to that of ``s.rx``. ``points`` overrides the
    linear grid (e.g. for log-spaced sweeps).
    """
    if points is None and not start_m > 0:
        raise ValueError("distance range must be positive")
    pos = s.rx.position
    if theta_r is None:
        theta_r = elevation_of(pos)
    if phi_r is None:
        phi_r = math.atan2(pos.y, pos.x)
    x = np.asarray(points, dtype=float) if points is not None else _arange(start_m, stop_m, step_m)
    if not np.all(x > 0):
        raise ValueError("distances must be positive")
    scenarios = [s.with_rx(spherical_to_cartesian(d, theta_r, phi_r)) for d in x]
    return _run_sweep("distance", x, scenarios, models, legacy_gain, workers)
