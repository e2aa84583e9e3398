"""Calibration, measurement files, model-vs-measurement comparison and unit-cell SPA metrics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .engine import SweepTable
from .geometry import SPEED_OF_LIGHT


class MeasurementFormatError(ValueError):
    """A measurement or sweep CSV file could not be parsed."""


class ComparisonDomainError(ValueError):
    """Model and measurement abscissae do not overlap."""


@dataclass(frozen=True)
class CalibrationRecord:
    system: str
    frequency: float
    gain_db: float


# measured G_t G_r G_line per measurement system and frequency
CALIBRATIONS = (
    CalibrationRecord("A", 27e9, 2.9),
    CalibrationRecord("B", 27e9, 24.0),
    CalibrationRecord("B", 33e9, 22.0),
)


def calibration_gain(pt: float, pr: float, d: float, wavelength: float) -> float:
    """Lumped ``G_t G_r G_line`` in dB from an aligned line-of-sight link at distance ``d``."""
    for name, v in (("pt", pt), ("pr", pr), ("d", d), ("wavelength", wavelength)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    return 10.0 * math.log10(pr / pt * (4.0 * math.pi * d / wavelength) ** 2)


def friis_received_power(pt: float, gain_db: float, d: float, wavelength: float) -> float:
    """Inverse of :func:`calibration_gain`."""
    return pt * 10.0 ** (gain_db / 10.0) * (wavelength / (4.0 * math.pi * d)) ** 2


@dataclass(frozen=True)
class SpaReport:
    """Scattering / power / area figures of one unit cell.

    Scattering performance is measured by the cell area itself, since only
    ratios between cells are meaningful.
    """

    scattering: float
    power: float
    area: float

    @property
    def energy_efficiency(self) -> float:
        return self.scattering / self.power

    @property
    def area_efficiency(self) -> float:
        return self.scattering / self.area

    @property
    def power_density(self) -> float:
        return self.power / self.area


def spa_metrics(dx: float, dy: float, frequency: float, pu: float) -> SpaReport:
    if not (dx > 0 and dy > 0 and frequency > 0 and pu > 0):
        raise ValueError("cell size, frequency and power must be positive")
    area = dx * dy
    return SpaReport(scattering=area, power=pu, area=area)


def spa_compare(f1: float, f2: float, pu: float, cell_wavelengths=(0.5, 0.5)) -> dict:
    """Ratios between cells sized as fixed fractions of the wavelength at ``f1`` and ``f2``."""
    fx, fy = cell_wavelengths

    def report(f):
        lam = SPEED_OF_LIGHT / f
        return spa_metrics(fx * lam, fy * lam, f, pu)

    a, b = report(f1), report(f2)
    return {
        "low": a,
        "high": b,
        "energy_efficiency_ratio": a.energy_efficiency / b.energy_efficiency,
        "power_density_ratio": b.power_density / a.power_density,
        "area_efficiency_ratio": a.area_efficiency / b.area_efficiency,
    }


@dataclass(frozen=True)
class MeasurementSeries:
    kind: str
    x: np.ndarray
    power_dbm: np.ndarray


def _read_rows(path: Union[str, Path], expected_header):
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise MeasurementFormatError(f"{path}: empty file")
        header = [h.strip() for h in header]
        if expected_header is not None and header != list(expected_header):
            raise MeasurementFormatError(
                f"{path}:1: expected header {','.join(expected_header)!r}, got {','.join(header)!r}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise MeasurementFormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                values = [float(c) for c in row]
            except ValueError:
                raise MeasurementFormatError(f"{path}:{lineno}: non-numeric value in {','.join(row)!r}") from None
            if not all(math.isfinite(v) for v in values):
                raise MeasurementFormatError(f"{path}:{lineno}: non-finite value")
            rows.append(values)
    return header, rows


def load_measurements(path: Union[str, Path], kind: str) -> MeasurementSeries:
    """Read an ``x,power_dbm`` CSV, sorted by ``x``.

    Repeated ``x`` values are merged when their powers agree and rejected
    otherwise.
    """
    if kind not in ("angle", "distance"):
        raise ValueError(f"abscissa kind must be 'angle' or 'distance', got {kind!r}")
    _, rows = _read_rows(path, ("x", "power_dbm"))
    rows.sort(key=lambda r: r[0])
    xs, ps = [], []
    for x, p in rows:
        if xs and x == xs[-1]:
            if p != ps[-1]:
                raise MeasurementFormatError(f"{path}: conflicting powers for repeated x={x}")
            continue
        xs.append(x)
        ps.append(p)
    return MeasurementSeries(kind, np.array(xs), np.array(ps))


def compare(model: SweepTable, meas: MeasurementSeries, column: str = "refined") -> dict:
    """RMSE and mean bias (measurement minus model, dB) at measurement points inside the model range.

    The model is interpolated linearly in (x, dBm); no extrapolation.
    """
    if model.kind != meas.kind:
        raise ComparisonDomainError(f"abscissa kinds differ: model {model.kind!r}, measurement {meas.kind!r}")
    mx = model.x
    my = model.dbm(column)
    inside = (meas.x >= mx[0]) & (meas.x <= mx[-1])
    if not np.any(inside):
        raise ComparisonDomainError("measurement and model abscissa ranges do not overlap")
    x = meas.x[inside]
    predicted = np.interp(x, mx, my)
    residual = meas.power_dbm[inside] - predicted
    return {
        "rmse_db": float(np.sqrt(np.mean(residual**2))),
        "bias_db": float(np.mean(residual)),
        "n": int(x.size),
        "x": x,
        "model_dbm": predicted,
        "meas_dbm": meas.power_dbm[inside],
        "residual_db": residual,
    }


def write_residuals(path: Union[str, Path], result: dict):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("x,model_dbm,meas_dbm,residual_db\n")
        for x, m, p, r in zip(result["x"], result["model_dbm"], result["meas_dbm"], result["residual_db"]):
            fh.write(f"{x:.6f},{m:.12f},{p:.12f},{r:.12f}\n")


# sweep tables on disk: x,<model>_dbm,...


def write_sweep_csv(path: Union[str, Path], table: SweepTable):
    names = list(table.columns)
    cols = [table.dbm(n) for n in names]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(["x"] + [f"{n}_dbm" for n in names]) + "\n")
        for i, x in enumerate(table.x):
            fh.write(",".join([f"{x:.6f}"] + [f"{c[i]:.12f}" for c in cols]) + "\n")


def read_sweep_csv(path: Union[str, Path], kind: str) -> SweepTable:
    header, rows = _read_rows(path, None)
    if not header or header[0] != "x" or len(header) < 2 or not all(h.endswith("_dbm") for h in header[1:]):
        raise MeasurementFormatError(f"{path}:1: expected header 'x,<model>_dbm,...', got {','.join(header)!r}")
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    columns = {h[: -len("_dbm")]: 1e-3 * 10.0 ** (data[:, i] / 10.0) for i, h in enumerate(header) if i}
    try:
        return SweepTable(kind, data[:, 0], columns)
    except ValueError as exc:
        raise MeasurementFormatError(f"{path}: {exc}") from None
