"""Per-cell reflection coefficients: uniform, stripe, focusing and 1-bit maps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import Point3, RisGrid, grid_link_geometry


def wrap_phase(phase):
    """Wrap radians into ``(-pi, pi]``."""
    w = np.mod(np.asarray(phase, dtype=float) + math.pi, 2.0 * math.pi) - math.pi
    w = np.where(w == -math.pi, math.pi, w)
    return w[()] if np.ndim(w) == 0 else w


@dataclass(frozen=True)
class CodingState:
    label: str
    amplitude: float
    phase: float

    def __post_init__(self):
        if not 0.0 <= self.amplitude <= 1.0:
            raise ValueError(f"state {self.label!r}: amplitude must lie in [0, 1], got {self.amplitude}")

    @classmethod
    def from_degrees(cls, label: str, amplitude: float, phase_deg: float) -> "CodingState":
        return cls(str(label), float(amplitude), math.radians(phase_deg))

    @property
    def gamma(self) -> complex:
        return self.amplitude * complex(math.cos(self.phase), math.sin(self.phase))


class ReflectionMap:
    """Complex reflection coefficients of every cell, shape ``(rows, cols)``.

    ``labels`` optionally records which coding state each cell uses.
    Instances are read-only.
    """

    def __init__(self, grid: RisGrid, gamma, labels: Optional[np.ndarray] = None):
        gamma = np.array(gamma, dtype=complex)
        if gamma.shape != (grid.rows, grid.cols):
            raise ValueError(f"map shape {gamma.shape} does not match grid ({grid.rows}, {grid.cols})")
        if np.any(np.abs(gamma) > 1.0 + 1e-12):
            raise ValueError("passive surface: every |gamma| must be <= 1")
        gamma.setflags(write=False)
        if labels is not None:
            labels = np.array(labels, dtype=object)
            if labels.shape != gamma.shape:
                raise ValueError("labels shape does not match the map")
            labels.setflags(write=False)
        self.grid = grid
        self.gamma = gamma
        self.labels = labels

    @property
    def amplitude(self) -> np.ndarray:
        return np.abs(self.gamma)

    @property
    def phase(self) -> np.ndarray:
        return np.angle(self.gamma)

    def uniform_amplitude(self, rtol: float = 1e-12) -> float:
        """Common ``|gamma|`` of all cells; raises if the amplitudes differ."""
        a = self.amplitude
        ref = float(a.flat[0])
        if not np.allclose(a, ref, rtol=rtol, atol=0.0):
            raise ValueError("closed-form models need a uniform reflection amplitude")
        return ref

    def __eq__(self, other):
        if not isinstance(other, ReflectionMap):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.gamma, other.gamma)

    def __repr__(self):
        return f"ReflectionMap({self.grid.rows}x{self.grid.cols})"


def uniform_coding(grid: RisGrid, state: CodingState) -> ReflectionMap:
    gamma = np.full((grid.rows, grid.cols), state.gamma, dtype=complex)
    labels = np.full(gamma.shape, state.label, dtype=object)
    return ReflectionMap(grid, gamma, labels)


def column_residue(m, period: int):
    """``mod(m, P)`` taken in ``[1, P]`` for 1-based column index ``m``."""
    return (np.asarray(m) - 1) % period + 1


def stripe_coding(
    grid: RisGrid, period: int, window: Sequence[int], state0: CodingState, state1: CodingState
) -> ReflectionMap:
    """Column stripes: ``state0`` where ``mod(m, period)`` falls in the inclusive ``window``.

    The residue is taken in ``[1, period]``, so ``period=14, window=(1, 7)``
    puts columns 1-7 in ``state0`` and 8-14 in ``state1``, repeating.
    """
    if int(period) != period or period < 2:
        raise ValueError(f"stripe period must be an integer >= 2, got {period}")
    lo, hi = (int(v) for v in window)
    if not 1 <= lo <= hi <= period:
        raise ValueError(f"stripe window [{lo}, {hi}] must be non-empty and within [1, {period}]")
    residue = column_residue(np.arange(1, grid.cols + 1), int(period))
    use0 = (residue >= lo) & (residue <= hi)
    cols = np.where(use0, state0.gamma, state1.gamma)
    col_labels = np.where(use0, state0.label, state1.label).astype(object)
    gamma = np.broadcast_to(cols, (grid.rows, grid.cols))
    labels = np.broadcast_to(col_labels, (grid.rows, grid.cols))
    return ReflectionMap(grid, gamma, labels)


def focusing_phases(grid: RisGrid, tx: Point3, rx: Point3, amplitude: float) -> ReflectionMap:
    """Co-phase every cell's contribution at ``rx`` for a source at ``tx``.

    Each cell gets phase ``2 pi (r_t + r_r) / lambda`` wrapped into
    ``(-pi, pi]``, which cancels the propagation phase of its path.
    """
    if not 0.0 <= amplitude <= 1.0:
        raise ValueError(f"amplitude must lie in [0, 1], got {amplitude}")
    geom = grid_link_geometry(grid, tx, rx)
    phase = wrap_phase(2.0 * math.pi * (geom.r_t + geom.r_r) / grid.wavelength)
    return ReflectionMap(grid, amplitude * np.exp(1j * phase))


def quantize_1bit(rmap: ReflectionMap, state0: CodingState, state1: CodingState) -> ReflectionMap:
    """Snap each cell to the state whose phase is nearest (wrapped) to its current phase.

    Ties go to ``state0``.
    """
    if state0 == state1:
        raise ValueError("1-bit quantization needs two distinct states")
    ideal = rmap.phase
    dist0 = np.abs(wrap_phase(ideal - state0.phase))
    dist1 = np.abs(wrap_phase(ideal - state1.phase))
    use0 = dist0 <= dist1
    gamma = np.where(use0, state0.gamma, state1.gamma)
    labels = np.where(use0, state0.label, state1.label).astype(object)
    return ReflectionMap(rmap.grid, gamma, labels)
