"""Coordinate system and per-cell link geometry.

The RIS lies in the x-y plane with its centroid at the origin and the
terminals in the half-space z > 0. Angles are in radians and lengths in
meters throughout; conversion from degrees/mm/GHz happens at the I/O layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

SPEED_OF_LIGHT = 2.99792458e8

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    @property
    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class RisGrid:
    """Lattice of ``rows`` x ``cols`` unit cells of size ``cell_width`` x ``cell_length``.

    Rows run along y (index n, size ``cell_length``) and columns along x
    (index m, size ``cell_width``).
    """

    rows: int
    cols: int
    cell_width: float
    cell_length: float
    frequency: float

    def __post_init__(self):
        if int(self.rows) != self.rows or self.rows < 1:
            raise ValueError(f"rows must be a positive integer, got {self.rows}")
        if int(self.cols) != self.cols or self.cols < 1:
            raise ValueError(f"cols must be a positive integer, got {self.cols}")
        object.__setattr__(self, "rows", int(self.rows))
        object.__setattr__(self, "cols", int(self.cols))
        for name in ("cell_width", "cell_length", "frequency"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value}")
            object.__setattr__(self, name, value)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency

    @property
    def cell_area(self) -> float:
        return self.cell_width * self.cell_length

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @property
    def width(self) -> float:
        """Aperture extent along x."""
        return self.cols * self.cell_width

    @property
    def length(self) -> float:
        """Aperture extent along y."""
        return self.rows * self.cell_length

    @property
    def area(self) -> float:
        return self.size * self.cell_area

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(x, y)`` arrays of shape ``(rows, cols)`` of all cell centers."""
        m = np.arange(1, self.cols + 1, dtype=float)
        n = np.arange(1, self.rows + 1, dtype=float)
        x = (m - (self.cols + 1) / 2.0) * self.cell_width
        y = (n - (self.rows + 1) / 2.0) * self.cell_length
        xx, yy = np.meshgrid(x, y)
        return xx, yy


@dataclass(frozen=True)
class CellLinkGeometry:
    """Distances and direction cosines for one cell or a whole grid.

    Fields are floats for a single cell, or ``(rows, cols)`` arrays when
    produced by :func:`grid_link_geometry`.
    """

    r_t: ArrayLike
    r_r: ArrayLike
    d_nm: ArrayLike
    cos_theta_t: ArrayLike
    cos_theta_r: ArrayLike
    cos_theta_tx: ArrayLike
    cos_theta_rx: ArrayLike

    def mirrored(self) -> "CellLinkGeometry":
        """Same geometry seen with transmitter and receiver exchanged."""
        return CellLinkGeometry(
            r_t=self.r_r,
            r_r=self.r_t,
            d_nm=self.d_nm,
            cos_theta_t=self.cos_theta_r,
            cos_theta_r=self.cos_theta_t,
            cos_theta_tx=self.cos_theta_rx,
            cos_theta_rx=self.cos_theta_tx,
        )


def spherical_to_cartesian(d: float, theta: float, phi: float) -> Point3:
    """Place a terminal at distance ``d`` from the RIS center.

    ``theta`` is the elevation from the surface normal (z axis) and ``phi``
    the azimuth from the x axis.

    Raises:
        ValueError: if ``d <= 0`` or ``theta`` is outside ``[0, pi/2)``.
    """
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d}")
    if not 0.0 <= theta < math.pi / 2:
        raise ValueError(f"elevation must lie in [0, pi/2), got {theta}")
    s = math.sin(theta)
    return Point3(d * s * math.cos(phi), d * s * math.sin(phi), d * math.cos(theta))


def cell_center(grid: RisGrid, n: int, m: int) -> Point3:
    """Center of cell ``(n, m)`` using 1-based row/column indices."""
    if not 1 <= n <= grid.rows:
        raise IndexError(f"row index {n} outside [1, {grid.rows}]")
    if not 1 <= m <= grid.cols:
        raise IndexError(f"column index {m} outside [1, {grid.cols}]")
    x = (m - (grid.cols + 1) / 2.0) * grid.cell_width
    y = (n - (grid.rows + 1) / 2.0) * grid.cell_length
    return Point3(x, y, 0.0)


def _check_front(p: Point3, name: str):
    if not p.z > 0:
        raise ValueError(f"{name} must lie in front of the surface (z > 0), got z={p.z}")


def _law_of_cosines(d_c, r, d_nm):
    # angle at the terminal between its boresight (towards the RIS center)
    # and the direction to the cell
    return np.clip((d_c * d_c + r * r - d_nm * d_nm) / (2.0 * d_c * r), -1.0, 1.0)


def _geometry(x, y, tx: Point3, rx: Point3):
    _check_front(tx, "tx")
    _check_front(rx, "rx")
    r_t = np.sqrt((tx.x - x) ** 2 + (tx.y - y) ** 2 + tx.z**2)
    r_r = np.sqrt((rx.x - x) ** 2 + (rx.y - y) ** 2 + rx.z**2)
    d_nm = np.sqrt(x * x + y * y)
    d1 = tx.norm
    d2 = rx.norm
    return CellLinkGeometry(
        r_t=r_t,
        r_r=r_r,
        d_nm=d_nm,
        cos_theta_t=np.clip(tx.z / r_t, -1.0, 1.0),
        cos_theta_r=np.clip(rx.z / r_r, -1.0, 1.0),
        cos_theta_tx=_law_of_cosines(d1, r_t, d_nm),
        cos_theta_rx=_law_of_cosines(d2, r_r, d_nm),
    )


def link_geometry(grid: RisGrid, tx: Point3, rx: Point3, n: int, m: int) -> CellLinkGeometry:
    """Geometry of the tx -> cell ``(n, m)`` -> rx path as plain floats."""
    c = cell_center(grid, n, m)
    g = _geometry(c.x, c.y, tx, rx)
    return CellLinkGeometry(**{k: float(v) for k, v in vars(g).items()})


def grid_link_geometry(grid: RisGrid, tx: Point3, rx: Point3) -> CellLinkGeometry:
    """Vectorized :func:`link_geometry` over every cell, arrays of shape ``(rows, cols)``."""
    x, y = grid.cell_centers()
    return _geometry(x, y, tx, rx)


def fraunhofer_distance(grid: RisGrid) -> float:
    """Far-field boundary ``2 D^2 / lambda`` with ``D`` the longer aperture side."""
    d = max(grid.width, grid.length)
    return 2.0 * d * d / grid.wavelength


def elevation_of(p: Point3) -> float:
    """Elevation angle of ``p`` seen from the RIS center."""
    return math.acos(min(1.0, p.z / p.norm))
