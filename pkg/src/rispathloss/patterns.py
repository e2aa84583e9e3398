"""Normalized power radiation patterns of terminals and unit cells."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import integrate

from .geometry import CellLinkGeometry


def exponent_from_gain(gain: float) -> float:
    """Cosine-power exponent of a half-space antenna with the given linear gain."""
    if not gain >= 2.0:
        raise ValueError(
            f"a cosine-power pattern needs gain >= 2, got {gain}; use the isotropic pattern instead"
        )
    return gain / 2.0 - 1.0


def gain_from_pattern_integral(alpha: float) -> float:
    """Directivity ``4 pi / integral(F dOmega)`` of ``cos(theta)**alpha`` by quadrature."""
    if alpha < 0:
        raise ValueError(f"exponent must be non-negative, got {alpha}")
    inner, _ = integrate.quad(
        lambda t: math.cos(t) ** alpha * math.sin(t), 0.0, math.pi / 2, epsabs=0.0, epsrel=1e-12, limit=200
    )
    # the pattern is azimuth independent so the phi integral is 2 pi
    return 4.0 * math.pi / (2.0 * math.pi * inner)


def _cos_power(c, alpha: float):
    c = np.asarray(c, dtype=float)
    out = np.zeros_like(c)
    pos = c > 0
    if alpha == 0.0:
        out[pos] = 1.0
    else:
        out[pos] = np.exp(alpha * np.log(c[pos]))
    return out


@dataclass(frozen=True)
class AntennaPattern:
    """Azimuth-independent normalized power pattern of a terminal antenna.

    Use :meth:`from_gain`, :meth:`isotropic` or :meth:`tabulated` rather than
    the constructor.
    """

    alpha: Optional[float] = None
    isotropic_mode: bool = False
    table_theta: Optional[tuple] = None
    table_value: Optional[tuple] = None
    table_gain: Optional[float] = None

    @classmethod
    def from_gain(cls, gain: float) -> "AntennaPattern":
        return cls(alpha=exponent_from_gain(gain))

    @classmethod
    def from_exponent(cls, alpha: float) -> "AntennaPattern":
        if alpha < 0:
            raise ValueError(f"exponent must be non-negative, got {alpha}")
        return cls(alpha=float(alpha))

    @classmethod
    def isotropic(cls) -> "AntennaPattern":
        return cls(isotropic_mode=True)

    @classmethod
    def tabulated(cls, theta, value, gain: float) -> "AntennaPattern":
        """Measured pattern sampled at increasing ``theta`` (radians), linearly interpolated.

        Outside the table the pattern is zero.
        """
        theta = np.asarray(theta, dtype=float)
        value = np.asarray(value, dtype=float)
        if theta.ndim != 1 or theta.shape != value.shape or theta.size < 2:
            raise ValueError("pattern table needs matching 1-D theta/value arrays of length >= 2")
        if np.any(np.diff(theta) <= 0):
            raise ValueError("pattern table theta must be strictly increasing")
        if np.any(value < 0) or np.any(value > 1):
            raise ValueError("normalized pattern values must lie in [0, 1]")
        return cls(table_theta=tuple(theta), table_value=tuple(value), table_gain=float(gain))

    @property
    def gain(self) -> float:
        if self.isotropic_mode:
            return 1.0
        if self.table_theta is not None:
            return self.table_gain
        return 2.0 * (self.alpha + 1.0)

    def value(self, theta):
        """Pattern value at elevation ``theta`` off boresight (radians)."""
        theta = np.asarray(theta, dtype=float)
        if self.isotropic_mode:
            out = np.ones_like(theta)
        elif self.table_theta is not None:
            out = np.interp(theta, self.table_theta, self.table_value, left=0.0, right=0.0)
        else:
            c = np.cos(theta)
            out = np.where(theta <= math.pi / 2, _cos_power(np.maximum(c, 0.0), self.alpha), 0.0)
            if self.alpha == 0.0:
                out = np.where(theta <= math.pi / 2, 1.0, 0.0)
        return out[()] if out.ndim == 0 else out

    def value_from_cos(self, c):
        """Pattern value given the cosine of the off-boresight angle; zero for ``c <= 0``."""
        c = np.asarray(c, dtype=float)
        if self.isotropic_mode:
            out = np.where(c > 0, 1.0, 0.0)
        elif self.table_theta is not None:
            out = np.where(c > 0, self.value(np.arccos(np.clip(c, -1.0, 1.0))), 0.0)
        else:
            out = _cos_power(c, self.alpha)
        return out[()] if np.ndim(out) == 0 else out


def as_pattern(spec: Union[float, AntennaPattern]) -> AntennaPattern:
    """Accept a pattern or a linear gain (``1`` means isotropic)."""
    if isinstance(spec, AntennaPattern):
        return spec
    if spec == 1:
        return AntennaPattern.isotropic()
    return AntennaPattern.from_gain(spec)


def antenna_pattern_value(pattern: AntennaPattern, theta):
    return pattern.value(theta)


def unit_cell_pattern_value(theta):
    """Unit-cell pattern: ``cos(theta)`` in front of the surface, zero behind."""
    theta = np.asarray(theta, dtype=float)
    out = np.where(theta <= math.pi / 2, np.maximum(np.cos(theta), 0.0), 0.0)
    return out[()] if out.ndim == 0 else out


def combined_pattern(geom: CellLinkGeometry, tx, rx):
    """Joint angle-dependent factor of tx antenna, cell (twice) and rx antenna.

    ``tx``/``rx`` are patterns or linear gains. Works on scalar or array
    geometry. Each side is formed first and the two sides multiplied last, so
    exchanging the terminals gives a bitwise identical result.
    """
    tx = as_pattern(tx)
    rx = as_pattern(rx)
    ct = np.asarray(geom.cos_theta_t, dtype=float)
    cr = np.asarray(geom.cos_theta_r, dtype=float)
    side_t = tx.value_from_cos(geom.cos_theta_tx) * np.maximum(ct, 0.0)
    side_r = rx.value_from_cos(geom.cos_theta_rx) * np.maximum(cr, 0.0)
    out = np.asarray(side_t * side_r)
    return out[()] if out.ndim == 0 else out
